#pragma once
// Numeric helpers: compensated summation, log-sum-exp, moment accumulation,
// least-squares fits on decay curves.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rwre {

// Kahan-Neumaier compensated accumulator.
class KahanSum {
  public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log(sum exp(v)) over a vector of log-values, stable for widely spread inputs.
inline double logsumexp(const std::vector<double>& logs, std::size_t begin, std::size_t end) {
    if (begin >= end) return -std::numeric_limits<double>::infinity();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, logs[i]);
    if (std::isinf(m)) return m;
    KahanSum s;
    for (std::size_t i = begin; i < end; ++i) s.add(std::exp(logs[i] - m));
    return m + std::log(s.value());
}

struct MeanVar {
    std::int64_t n = 0;
    double mean = 0.0;
    double var = 0.0;  // population variance of the sample
    double stderr_mean = 0.0;
};

inline MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar r;
    r.n = static_cast<std::int64_t>(xs.size());
    if (r.n == 0) return r;
    KahanSum s;
    for (double x : xs) s.add(x);
    r.mean = s.value() / static_cast<double>(r.n);
    KahanSum q;
    for (double x : xs) q.add((x - r.mean) * (x - r.mean));
    r.var = q.value() / static_cast<double>(r.n);
    r.stderr_mean = (r.n > 1) ? std::sqrt(r.var / static_cast<double>(r.n - 1)) : 0.0;
    return r;
}

// Normal-approximation standard error of a binomial frequency.
inline double binom_stderr(double phat, std::int64_t n) {
    if (n <= 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(n));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double sse = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("linear_fit needs >= 2 paired points");
    std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LinearFit f;
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.sse = std::max(syy - f.slope * sxy, 0.0);
    f.r2 = (syy > 0.0) ? 1.0 - f.sse / syy : 1.0;
    return f;
}

// Golden-section minimizer for a unimodal-ish 1-d objective. Good enough for
// the stretched-exponent search; callers bracket the exponent themselves.
template <class Fn>
double golden_min(Fn f, double a, double b, double tol = 1e-7) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace rwre
