#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace exactrc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// log(sum_i exp(v_i)); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v)
{
    double pivot = kNegInf;
    for (double x : v)
        pivot = std::max(pivot, x);
    if (pivot == kNegInf)
        return kNegInf;
    CompensatedSum s;
    for (double x : v)
        s += std::exp(x - pivot);
    return pivot + std::log(s.value());
}

/// log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b)
{
    if (a == kNegInf)
        return b;
    if (b == kNegInf)
        return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

} // namespace exactrc
