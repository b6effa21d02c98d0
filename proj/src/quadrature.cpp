#include "cskor/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cskor {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1].
constexpr double kKronrodNodes[8] = {
    0.000000000000000000000000000000000, 0.207784955007898467600689403773245,
    0.405845151377397166906606412076961, 0.586087235467691130294144838258730,
    0.741531185599394439863864773280788, 0.864864423359769072789712788640926,
    0.949107912342758524526189684047851, 0.991455371120812639206854697526329};

constexpr double kKronrodWeights[8] = {
    0.209482141084727828012999174891714, 0.204432940075298892414161999234649,
    0.190350578064785409913256402421014, 0.169004726639267902826583426598550,
    0.140653259715525918745189590510238, 0.104790010322250183839876322541518,
    0.063092092629978553290700663189204, 0.022935322010529224963732008058970};

// Gauss weights go with Kronrod nodes 0,2,4,6 (the embedded G7 rule).
constexpr double kGaussWeights[4] = {
    0.417959183673469387755102040816327, 0.381830050505118944950369775488975,
    0.279705391489276667901467771423780, 0.129484966168869693270611432679082};

struct Panel {
    double a, b;
    double value;
    double err;
};

} // namespace

double gk15_panel(const std::function<double(double)>& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double f0 = f(mid);
    double k15 = kKronrodWeights[0] * f0;
    double g7 = kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fi = f(mid + dx) + f(mid - dx);
        k15 += kKronrodWeights[i] * fi;
        if (i % 2 == 0) g7 += kGaussWeights[i / 2] * fi;
    }
    k15 *= half;
    g7 *= half;

    const double diff = std::fabs(k15 - g7);
    err = diff;
    // QUADPACK-style sharpening of the raw difference.
    if (diff > 0.0) {
        const double scaled = 200.0 * diff;
        err = std::min(diff, scaled * std::sqrt(scaled) / 200.0);
        err = std::max(err, 1e-300);
    }
    return k15;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, std::span<const double> breakpoints) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::vector<double> edges;
    edges.push_back(a);
    for (double t : breakpoints)
        if (t > a && t < b) edges.push_back(t);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::vector<Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p{edges[i], edges[i + 1], 0.0, 0.0};
        p.value = gk15_panel(f, p.a, p.b, p.err);
        total += p.value;
        total_err += p.err;
        heap.push_back(p);
    }

    const auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
    std::make_heap(heap.begin(), heap.end(), cmp);

    const int max_panels = 4000;
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total)) &&
           static_cast<int>(heap.size()) < max_panels) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval at floating point resolution; keep it and stop splitting.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), cmp);
            break;
        }
        Panel left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
        left.value = gk15_panel(f, left.a, left.b, left.err);
        right.value = gk15_panel(f, right.a, right.b, right.err);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
    }

    // Recompute the error sum to undo cancellation drift.
    total_err = 0.0;
    for (const Panel& p : heap) total_err += p.err;

    out.value = total;
    out.error_estimate = total_err;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::fabs(total)) * 1.000001 ||
                    total_err <= 1e-14 * std::fabs(total);
    return out;
}

double pv_integrate(const std::function<double(double)>& f, double a, double b, double pole,
                    double abs_tol, double rel_tol) {
    if (!(a < b)) return 0.0;
    if (pole <= a || pole >= b) return integrate(f, a, b, abs_tol, rel_tol).value;

    const double w = 0.5 * std::min(pole - a, b - pole);
    auto pair_sum = [&f, pole](double t) { return f(pole + t) + f(pole - t); };
    double total = integrate(pair_sum, 0.0, w, abs_tol, rel_tol).value;
    total += integrate(f, a, pole - w, abs_tol, rel_tol).value;
    total += integrate(f, pole + w, b, abs_tol, rel_tol).value;
    return total;
}

} // namespace cskor
