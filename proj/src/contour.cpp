#include "resvort/contour.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace resvort {

namespace {

// Gauss-Kronrod (7,15) on [-1,1].
constexpr double kXK[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
};
constexpr double kWK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
constexpr double kWG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

struct Panel {
    Complex a, b;
    Complex value;
    double err = 0.0;
    double max_abs = 0.0;
};

Panel eval_panel(const std::function<Complex(Complex)>& f, Complex a, Complex b) {
    const Complex mid = 0.5 * (a + b);
    const Complex half = 0.5 * (b - a);
    Complex k15 = kWK[7] * f(mid);
    Complex g7 = kWG[3] * f(mid);
    double max_abs = std::abs(k15) / kWK[7];
    for (int i = 0; i < 7; ++i) {
        const Complex fp = f(mid + half * kXK[i]);
        const Complex fm = f(mid - half * kXK[i]);
        k15 += kWK[i] * (fp + fm);
        max_abs = std::max({max_abs, std::abs(fp), std::abs(fm)});
        if (i % 2 == 1) g7 += kWG[i / 2] * (fp + fm);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = half * k15;
    p.err = std::abs(half) * std::abs(k15 - g7);
    p.max_abs = max_abs;
    return p;
}

void seed_segment_panels(const Segment& seg, double near_origin_split,
                         std::vector<std::pair<Complex, Complex>>& edges) {
    const double len = std::abs(seg.b - seg.a);
    if (len == 0.0) return;
    const Complex dir = (seg.b - seg.a) / len;
    const double base = std::clamp(4.0 / std::max(seg.osc_rate, 1e-3), 0.05, len);
    switch (seg.kind) {
        case SegmentKind::origin_fine: {
            // geometric ladder toward the segment start
            const double fine = std::min(len, std::max(near_origin_split, 1e-3));
            double t = fine * std::pow(2.0, -46);
            edges.emplace_back(seg.a, seg.a + dir * t);
            while (t < fine) {
                double tn = std::min(2.0 * t, fine);
                edges.emplace_back(seg.a + dir * t, seg.a + dir * tn);
                t = tn;
            }
            double x = fine;
            while (x < len) {
                double xn = std::min(x + base, len);
                edges.emplace_back(seg.a + dir * x, seg.a + dir * xn);
                x = xn;
            }
            break;
        }
        case SegmentKind::oscillatory: {
            const int n = std::max(1, int(std::ceil(len / base)));
            for (int i = 0; i < n; ++i)
                edges.emplace_back(seg.a + dir * (len * i / n), seg.a + dir * (len * (i + 1) / n));
            break;
        }
        case SegmentKind::growing: {
            double x = 0.0, step = base;
            while (x < len) {
                double xn = std::min(x + step, len);
                edges.emplace_back(seg.a + dir * x, seg.a + dir * xn);
                x = xn;
                step *= 1.25;
            }
            break;
        }
    }
}

}  // namespace

void ContourSpec::validate() const {
    if (!(rotation_angle > 0.0 && rotation_angle < 1.5707963267948966))
        throw DomainError("rotation_angle must lie in (0, pi/2)");
    if (!(trench_depth > 0.0 && trench_depth < 1.5))
        throw DomainError("trench_depth must lie in (0, 1.5)");
    if (!(near_origin_split > 0.0)) throw DomainError("near_origin_split must be positive");
    if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (max_panels < 1) throw DomainError("max_panels must be >= 1");
    if (truncation_bound < 0.0) throw DomainError("truncation_bound must be non-negative");
}

QuadratureResult integrate_deformed(const std::function<Complex(Complex)>& integrand,
                                    const Path& path, const ContourSpec& spec) {
    spec.validate();
    std::vector<std::pair<Complex, Complex>> edges;
    for (const Segment& seg : path) seed_segment_panels(seg, spec.near_origin_split, edges);

    auto cmp = [](const Panel& l, const Panel& r) { return l.err < r.err; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);

    QuadratureResult res;
    Complex total = 0.0;
    double total_err = 0.0;
    for (auto& [a, b] : edges) {
        Panel p = eval_panel(integrand, a, b);
        total += p.value;
        total_err += p.err;
        res.max_abs_integrand = std::max(res.max_abs_integrand, p.max_abs);
        heap.push(p);
    }
    res.panels = int(edges.size());

    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (res.panels >= spec.max_panels)
            throw QuadratureError("panel budget exhausted before reaching tolerance");
        Panel worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.err;
        const Complex mid = 0.5 * (worst.a + worst.b);
        for (const Panel& child : {eval_panel(integrand, worst.a, mid),
                                   eval_panel(integrand, mid, worst.b)}) {
            total += child.value;
            total_err += child.err;
            res.max_abs_integrand = std::max(res.max_abs_integrand, child.max_abs);
            heap.push(child);
        }
        ++res.panels;
    }

    res.value = total;
    res.error_estimate = total_err;
    return res;
}

Path make_ray_path(double theta, double length, double osc_rate) {
    const Complex dir = std::polar(1.0, theta);
    Segment s;
    s.a = 0.0;
    s.b = dir * length;
    s.kind = SegmentKind::growing;
    s.osc_rate = osc_rate;
    return {s};
}

Path make_trench_path(double depth, double x_end, double osc_rate) {
    Path p;
    Segment down;
    down.a = 0.0;
    down.b = Complex(depth, -depth);
    down.kind = SegmentKind::origin_fine;
    down.osc_rate = osc_rate;
    p.push_back(down);
    Segment run;
    run.a = down.b;
    run.b = Complex(x_end, -depth);
    run.kind = SegmentKind::oscillatory;
    run.osc_rate = osc_rate;
    p.push_back(run);
    return p;
}

Path make_dip_ray_path(double dip_len, double theta, double length, double osc_rate) {
    constexpr double kDipAngle = 0.6;
    Path p;
    Segment dip;
    dip.a = 0.0;
    dip.b = std::polar(dip_len, -kDipAngle);
    dip.kind = SegmentKind::origin_fine;
    dip.osc_rate = osc_rate;
    p.push_back(dip);
    const Complex anchor = std::polar(1.55, theta);
    Segment rise;
    rise.a = dip.b;
    rise.b = anchor;
    rise.kind = SegmentKind::oscillatory;
    rise.osc_rate = osc_rate;
    p.push_back(rise);
    Segment ray;
    ray.a = anchor;
    ray.b = anchor + std::polar(length, theta);
    ray.kind = SegmentKind::growing;
    ray.osc_rate = osc_rate;
    p.push_back(ray);
    return p;
}

}  // namespace resvort
