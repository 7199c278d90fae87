#include "exactrc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace exactrc {

namespace {

double real_gcd(double a, double b, double cutoff)
{
    if (a < b)
        std::swap(a, b);
    while (b > cutoff) {
        double r = std::fmod(a, b);
        if (b - r <= cutoff)
            r = 0.0;
        a = b;
        b = r;
    }
    return a;
}

std::vector<double> distinct_sorted(std::span<const double> values, double cutoff)
{
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > cutoff)
            out.push_back(x);
    return out;
}

bool rows_match(std::vector<double> a, std::vector<double> b, double tol)
{
    if (a.size() != b.size())
        return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol)
            return false;
    return true;
}

} // namespace

LatticeFit fit_lattice(std::span<const double> values, double tol)
{
    LatticeFit fit;
    if (values.empty())
        return fit;
    double scale = 1.0;
    for (double v : values)
        scale = std::max(scale, std::abs(v));
    const double cutoff = tol * scale;

    const auto pts = distinct_sorted(values, cutoff);
    if (pts.size() < 2)
        return fit;

    double g = pts[1] - pts[0];
    for (std::size_t i = 2; i < pts.size(); ++i)
        g = real_gcd(g, pts[i] - pts[0], cutoff);
    if (g < cutoff)
        return fit;
    fit.candidate = g;

    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = pts[i] - pts[0];
        const double k = std::round(d / g);
        fit.max_residue = std::max(fit.max_residue, std::abs(d - k * g) / g);
    }
    if (fit.max_residue < kLatticeVerifyTol)
        fit.span = g;
    return fit;
}

std::optional<double> real_lattice_span(std::span<const double> values, double tol)
{
    return fit_lattice(values, tol).span;
}

bool is_strongly_symmetric(const DiscreteChannel& ch, double tol)
{
    const auto& m = ch.matrix();
    for (std::size_t x = 1; x < m.size(); ++x)
        if (!rows_match(m[0], m[x], tol))
            return false;
    const auto column = [&](std::size_t y) {
        std::vector<double> c;
        for (const auto& row : m)
            c.push_back(row[y]);
        return c;
    };
    const auto first = column(0);
    for (std::size_t y = 1; y < ch.num_outputs(); ++y)
        if (!rows_match(first, column(y), tol))
            return false;
    return true;
}

ChannelClass classify_channel(const NuTable& nu, const DiscreteChannel& ch)
{
    ChannelClass cc;
    std::vector<double> finite;
    for (std::size_t a = 0; a < nu.num_atoms(); ++a)
        for (std::size_t xp = 0; xp < nu.num_inputs(); ++xp)
            if (nu.at(a, xp).is_finite())
                finite.push_back(nu.at(a, xp).as_double());

    cc.singular = std::all_of(finite.begin(), finite.end(), [](double v) { return std::abs(v) <= 1e-12; });
    if (!cc.singular) {
        cc.nu_fit = fit_lattice(finite);
        cc.nu_span = cc.nu_fit.span.value_or(0.0);
    }
    cc.strongly_symmetric = is_strongly_symmetric(ch);
    return cc;
}

ChannelClass classify_channel(const DiscreteChannel& ch)
{
    return classify_channel(NuTable(ch), ch);
}

PairClass classify_pair(const ZSupport& zs, const TiltedStats& stats)
{
    PairClass pc;
    std::vector<double> z0;
    z0.reserve(zs.atoms.size());
    for (const auto& a : zs.atoms)
        z0.push_back(a.z0);

    pc.z_fit = fit_lattice(z0);
    if (pc.z_fit.span) {
        const double h = *pc.z_fit.span;
        const double lo = *std::min_element(z0.begin(), z0.end());
        double a = std::fmod(lo, h);
        if (a < 0.0)
            a += h;
        if (a >= h)
            a -= h;
        pc.z_lattice = ZLattice{h, a};
    }

    // Affine fit z1 = c + s z0 over the support points.
    double z0_lo = z0.front();
    double z0_hi = z0.front();
    double z1_scale = 1.0;
    for (const auto& a : zs.atoms) {
        z0_lo = std::min(z0_lo, a.z0);
        z0_hi = std::max(z0_hi, a.z0);
        z1_scale = std::max(z1_scale, std::abs(a.z1));
    }
    double residual = 0.0;
    if (z0_hi - z0_lo <= 1e-12 * std::max(1.0, std::abs(z0_hi))) {
        double z1_lo = zs.atoms.front().z1;
        double z1_hi = z1_lo;
        for (const auto& a : zs.atoms) {
            z1_lo = std::min(z1_lo, a.z1);
            z1_hi = std::max(z1_hi, a.z1);
        }
        residual = z1_hi - z1_lo;
    } else {
        const double n = static_cast<double>(zs.atoms.size());
        double m0 = 0.0, m1 = 0.0;
        for (const auto& a : zs.atoms) {
            m0 += a.z0;
            m1 += a.z1;
        }
        m0 /= n;
        m1 /= n;
        double sxx = 0.0, sxy = 0.0;
        for (const auto& a : zs.atoms) {
            sxx += (a.z0 - m0) * (a.z0 - m0);
            sxy += (a.z0 - m0) * (a.z1 - m1);
        }
        const double slope = sxy / sxx;
        for (const auto& a : zs.atoms)
            residual = std::max(residual, std::abs(a.z1 - m1 - slope * (a.z0 - m0)));
    }
    pc.affine_residual = residual;
    const bool flat_det = std::abs(stats.det_sigma) <= 1e-10 * std::max(1.0, stats.sigma00 * stats.sigma11);
    pc.pseudo_symmetric = flat_det && residual <= 1e-9 * z1_scale;
    return pc;
}

} // namespace exactrc
