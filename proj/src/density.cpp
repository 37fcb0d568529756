#include "momentlock/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <utility>
#include <vector>

namespace momentlock {

namespace {

constexpr double kNormalTruncation = 12.0;

// Kronrod-15 abscissae on [-1,1] (positive half) and weights; the embedded
// Gauss-7 rule sits on the odd-indexed points.
constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, estimate, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gauss_kronrod_15(const F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double halflen = 0.5 * (hi - lo);
    double kronrod = kKronrodW[7] * f(center);
    double gauss = kGaussW[3] * f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = halflen * kKronrodX[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodW[j] * pair;
        if (j % 2 == 1) gauss += kGaussW[j / 2] * pair;
    }
    kronrod *= halflen;
    gauss *= halflen;
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

Density Density::uniform(double lo, double hi) {
    if (!(lo < hi)) throw InvalidParams("uniform density needs lo < hi");
    Density d;
    d.kind_ = DensityKind::uniform;
    d.name_ = "uniform";
    d.lo_ = lo;
    d.hi_ = hi;
    d.a_ = lo;
    d.b_ = hi;
    return d;
}

Density Density::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidParams("beta shapes must be positive");
    Density d;
    d.kind_ = DensityKind::beta;
    d.name_ = "beta";
    d.lo_ = 0.0;
    d.hi_ = 1.0;
    d.a_ = a;
    d.b_ = b;
    d.log_norm_ = log_beta(a, b);
    return d;
}

Density Density::std_normal() {
    Density d;
    d.kind_ = DensityKind::std_normal;
    d.name_ = "std_normal";
    d.lo_ = -kNormalTruncation;
    d.hi_ = kNormalTruncation;
    d.unbounded_ = true;
    return d;
}

Density Density::custom(std::function<double(double)> pdf, double lo, double hi,
                        std::string name) {
    if (!(lo < hi)) throw InvalidParams("custom density needs lo < hi");
    if (!pdf) throw InvalidParams("custom density needs a pdf callback");
    Density d;
    d.kind_ = DensityKind::custom;
    d.name_ = std::move(name);
    d.lo_ = lo;
    d.hi_ = hi;
    d.pdf_ = std::move(pdf);
    return d;
}

double Density::pdf(double x) const {
    switch (kind_) {
        case DensityKind::uniform:
            return (x >= lo_ && x <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
        case DensityKind::beta: {
            if (x < 0.0 || x > 1.0) return 0.0;
            // Endpoint values by continuity: x^0 = 1 at x = 0, and exact zero
            // when the exponent is positive.
            double num = 1.0;
            if (a_ != 1.0) num *= std::pow(x, a_ - 1.0);
            if (b_ != 1.0) num *= std::pow(1.0 - x, b_ - 1.0);
            return num * std::exp(-log_norm_);
        }
        case DensityKind::std_normal:
            return std::exp(-0.5 * x * x) * 0.3989422804014326779;
        case DensityKind::custom:
            return (x >= lo_ && x <= hi_) ? pdf_(x) : 0.0;
    }
    return 0.0;
}

double exact_polynomial_moment(const Density& d, int order) {
    if (order < 1) throw InvalidParams("moment order must be >= 1");
    switch (d.kind()) {
        case DensityKind::uniform: {
            const double c = d.param_a();
            const double h = d.param_b();
            // (d^{l+1} - c^{l+1}) / ((l+1)(d-c))
            return (std::pow(h, order + 1) - std::pow(c, order + 1)) /
                   ((order + 1) * (h - c));
        }
        case DensityKind::beta: {
            double m = 1.0;
            for (int j = 0; j < order; ++j)
                m *= (d.param_a() + j) / (d.param_a() + d.param_b() + j);
            return m;
        }
        case DensityKind::std_normal: {
            if (order % 2 == 1) return 0.0;
            double m = 1.0;
            for (int j = order - 1; j >= 2; j -= 2) m *= j;
            return m;
        }
        case DensityKind::custom:
            throw Unsupported("custom densities have no closed-form moments");
    }
    throw Unsupported("unknown density kind");
}

double expectation_oracle(const Density& d, const std::function<double(double)>& g,
                          double abs_tol) {
    const auto integrand = [&](double x) { return d.pdf(x) * g(x); };
    const double lo = d.support_lo();
    const double hi = d.support_hi();

    constexpr int kInitialSegments = 8;
    constexpr std::size_t kMaxSegments = 4096;

    std::priority_queue<Segment> queue;
    double total = 0.0;
    double total_err = 0.0;
    for (int i = 0; i < kInitialSegments; ++i) {
        const double a = lo + (hi - lo) * i / kInitialSegments;
        const double b = lo + (hi - lo) * (i + 1) / kInitialSegments;
        Segment s = gauss_kronrod_15(integrand, a, b);
        total += s.estimate;
        total_err += s.error;
        queue.push(s);
    }

    while (!(total_err <= abs_tol)) {
        if (queue.size() >= kMaxSegments || std::isnan(total_err))
            throw NoConvergence("oracle stalled at error " + std::to_string(total_err));
        Segment worst = queue.top();
        queue.pop();
        total -= worst.estimate;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.lo + worst.hi);
        for (Segment s : {gauss_kronrod_15(integrand, worst.lo, mid),
                          gauss_kronrod_15(integrand, mid, worst.hi)}) {
            total += s.estimate;
            total_err += s.error;
            queue.push(s);
        }
    }

    // Re-accumulate in a fixed order so results do not depend on heap layout.
    std::vector<Segment> segs;
    segs.reserve(queue.size());
    while (!queue.empty()) {
        segs.push_back(queue.top());
        queue.pop();
    }
    std::sort(segs.begin(), segs.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    long double acc = 0.0L;
    for (const Segment& s : segs) acc += s.estimate;
    return static_cast<double>(acc);
}

}  // namespace momentlock
