#include "qtrans/bathcorr.hpp"

#include "qtrans/error.hpp"
#include "qtrans/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace qtrans {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// G(w) / w^2, finite for w > 0.
double density_over_w2(const BathSpec& spec, double w)
{
    if (const auto* s = std::get_if<StructuredEffective>(&spec)) {
        const double o2 = s->omega * s->omega;
        const double d = o2 - w * w;
        const double b = 2.0 * s->gamma * w;
        return 2.0 * s->alpha * o2 * o2 / (w * (d * d + b * b));
    }
    const auto& o = std::get<OhmicExpCutoff>(spec);
    return 2.0 * o.alpha * std::exp(-w / o.omega_c) / w;
}

// Upper frequency beyond which both parts of the integrand contribute less
// than `budget` in absolute value.
double frequency_cutoff(const BathSpec& spec, const Thermal& thermal, double budget)
{
    const double beta = thermal.beta();
    if (const auto* s = std::get_if<StructuredEffective>(&spec)) {
        // For w >= 2 omega: G / w^2 <= (16/9) 2 alpha omega^4 / w^5, and the
        // real part carries at most 2 coth(beta w / 2).
        const double o4 = std::pow(s->omega, 4);
        double w = 2.0 * s->omega;
        for (;;) {
            const double bound = (16.0 / 9.0) * s->alpha * o4 / std::pow(w, 4) / std::tanh(0.5 * beta * w);
            if (bound <= budget)
                return w;
            w *= 1.25;
        }
    }
    const auto& o = std::get<OhmicExpCutoff>(spec);
    double w = o.omega_c;
    for (;;) {
        const double bound = 4.0 * o.alpha * o.omega_c * std::exp(-w / o.omega_c) / w / std::tanh(0.5 * beta * w);
        if (bound <= budget)
            return w;
        w *= 1.1;
    }
}

// 4-point Lagrange weights at offset x from the first node.
inline void cubic_weights(double x, double w[4])
{
    const double xm1 = x - 1.0, xm2 = x - 2.0, xm3 = x - 3.0;
    w[0] = -xm1 * xm2 * xm3 / 6.0;
    w[1] = x * xm2 * xm3 / 2.0;
    w[2] = -x * xm1 * xm3 / 2.0;
    w[3] = x * xm1 * xm2 / 6.0;
}

QValue interpolate(const CorrTable::Segment& seg, double t)
{
    const std::size_t n = seg.q_real.size() - 1; // intervals
    const double u = (t - seg.t0) / seg.step;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1);
    if (n < 3) {
        // Too few samples for a cubic stencil: linear.
        const double x = u - static_cast<double>(i);
        const auto k = static_cast<std::size_t>(i);
        return {seg.q_real[k] + x * (seg.q_real[k + 1] - seg.q_real[k]),
                seg.q_imag[k] + x * (seg.q_imag[k + 1] - seg.q_imag[k])};
    }
    const auto s = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(n) - 3));
    double w[4];
    cubic_weights(u - static_cast<double>(s), w);
    QValue q;
    for (int k = 0; k < 4; ++k) {
        q.real += w[k] * seg.q_real[s + k];
        q.imag += w[k] * seg.q_imag[s + k];
    }
    return q;
}

} // namespace

CorrParams corr_params(const StructuredEffective& spec, const Thermal& thermal)
{
    validate(BathSpec{spec});
    if (!(spec.gamma < spec.omega))
        throw ParameterError("overdamped structured bath (gamma >= omega): use q_quadrature");

    const double beta = thermal.beta();
    CorrParams p;
    p.alpha = spec.alpha;
    p.gamma = spec.gamma;
    p.omega = spec.omega;
    p.omega_bar = std::sqrt(spec.omega * spec.omega - spec.gamma * spec.gamma);
    p.x_rate = 2.0 * kPi * spec.alpha * thermal.temperature();
    p.n_coef = (spec.omega * spec.omega - 2.0 * spec.gamma * spec.gamma) / (2.0 * spec.gamma * p.omega_bar);

    // sinh(x) / (cosh x - cos y) and sin(y) / (cosh x - cos y), written
    // without overflow for large x = beta omega_bar.
    const double x = beta * p.omega_bar;
    const double y = beta * spec.gamma;
    const double e1 = std::exp(-x);
    const double e2 = e1 * e1;
    const double den = 1.0 + e2 - 2.0 * e1 * std::cos(y);
    const double hyp = (1.0 - e2) / den;
    const double trig = 2.0 * e1 * std::sin(y) / den;

    p.l_coef = kPi * spec.alpha * (p.n_coef * hyp - trig);
    p.z_coef = kPi * spec.alpha * (hyp + p.n_coef * trig);
    return p;
}

namespace {

inline double matsubara_term(double o2, double g2, double nu, double t)
{
    const double a = o2 + nu * nu;
    return (-std::expm1(-nu * t)) / (nu * (a * a - 4.0 * g2 * nu * nu));
}

double matsubara_sum(double alpha, double omega, double gamma, double temperature, double t,
                     double tol, std::size_t fixed_terms)
{
    if (t <= 0.0 || alpha == 0.0)
        return 0.0;
    const double o2 = omega * omega;
    const double g2 = gamma * gamma;
    const double nu1 = 2.0 * kPi * temperature;
    const double pref = 4.0 * kPi * alpha * o2 * o2 * temperature;

    double sum = 0.0;
    if (fixed_terms > 0) {
        // Smallest terms first.
        for (std::size_t n = fixed_terms; n >= 1; --n)
            sum += matsubara_term(o2, g2, nu1 * static_cast<double>(n), t);
        return pref * sum;
    }
    for (std::size_t n = 1;; ++n) {
        const double term = matsubara_term(o2, g2, nu1 * static_cast<double>(n), t);
        sum += term;
        if (n >= 4 && static_cast<double>(n) * term <= tol * sum)
            break;
        if (n > 100000000)
            throw NumericError("Matsubara series failed to converge");
    }
    return pref * sum;
}

} // namespace

double q_matsubara(const StructuredEffective& spec, const Thermal& thermal, double t, double tol)
{
    return matsubara_sum(spec.alpha, spec.omega, spec.gamma, thermal.temperature(), t, tol, 0);
}

double q_matsubara_partial(const StructuredEffective& spec, const Thermal& thermal, double t,
                           std::size_t terms)
{
    if (terms == 0)
        return 0.0;
    return matsubara_sum(spec.alpha, spec.omega, spec.gamma, thermal.temperature(), t, 0.0, terms);
}

QValue q_structured(const CorrParams& p, const Thermal& thermal, double t, double mats_tol)
{
    if (t <= 0.0)
        return {};
    const double damp = std::exp(-p.gamma * t);
    const double c = std::cos(p.omega_bar * t);
    const double s = std::sin(p.omega_bar * t);
    const double pa = kPi * p.alpha;

    QValue q;
    q.real = p.x_rate * t - p.l_coef * (damp * c - 1.0) - p.z_coef * damp * s
             + matsubara_sum(p.alpha, p.omega, p.gamma, thermal.temperature(), t, mats_tol, 0);
    q.imag = pa - damp * pa * (c - p.n_coef * s);
    return q;
}

QValue q_quadrature(const BathSpec& spec, const Thermal& thermal, double t, double abs_tol)
{
    if (std::holds_alternative<StrictOhmic>(spec))
        throw ParameterError("strict Ohmic bath has a UV-divergent Q(t); a cutoff is required");
    validate(spec);
    if (t <= 0.0 || coupling_alpha(spec) == 0.0)
        return {};

    const double beta = thermal.beta();
    const double w_max = frequency_cutoff(spec, thermal, 0.05 * abs_tol);

    double panel = kPi / t;
    std::vector<double> extra;
    if (const auto* s = std::get_if<StructuredEffective>(&spec)) {
        panel = std::min(panel, 0.25 * s->omega);
        for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0})
            extra.push_back(s->omega + k * s->gamma);
    } else {
        const auto& o = std::get<OhmicExpCutoff>(spec);
        panel = std::min({panel, 0.125 * o.omega_c, thermal.temperature()});
    }
    std::vector<double> br = quad::uniform_breaks(0.0, w_max, panel);
    for (double e : extra)
        if (e > 0.0 && e < w_max)
            br.push_back(e);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12 * (1.0 + std::abs(a)); }),
             br.end());

    auto f = [&](double w) -> quad::Vec<2> {
        const double gw = density_over_w2(spec, w);
        const double sh = std::sin(0.5 * w * t);
        return {gw * 2.0 * sh * sh / std::tanh(0.5 * beta * w), gw * std::sin(w * t)};
    };
    quad::Options opt;
    opt.abs_tol = 0.5 * abs_tol;
    opt.rel_tol = 1e-13;
    const auto r = quad::integrate_panels<2>(f, br, opt);
    if (!r.converged)
        throw NumericError("q_quadrature did not converge at t = " + num(t) + " (error "
                           + num(r.max_error()) + ")");
    return {r.value[0], r.value[1]};
}

const char* to_string(CorrSource s)
{
    switch (s) {
    case CorrSource::Zero: return "zero";
    case CorrSource::ClosedForm: return "closed_form";
    case CorrSource::Quadrature: return "quadrature";
    }
    return "?";
}

CorrTable::CorrTable(BathSpec spec, double temperature, double t_max, double tol_tail,
                     double interp_error, CorrSource source, std::vector<Segment> segments)
    : spec_(std::move(spec)), temperature_(temperature), t_max_(t_max), tol_tail_(tol_tail),
      interp_error_(interp_error), source_(source), segments_(std::move(segments))
{
}

QValue CorrTable::operator()(double t) const
{
    if (source_ == CorrSource::Zero || t <= 0.0)
        return {};
    // Segments are few (doubling lengths), so a backward scan is cheap.
    std::size_t k = segments_.size() - 1;
    while (k > 0 && t < segments_[k].t0)
        --k;
    return interpolate(segments_[k], std::min(t, t_max_));
}

std::vector<CorrSample> CorrTable::samples() const
{
    std::vector<CorrSample> out;
    out.reserve(size());
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& seg = segments_[k];
        // Shared boundary samples appear once.
        const std::size_t first = (k == 0) ? 0 : 1;
        for (std::size_t i = first; i < seg.q_real.size(); ++i)
            out.push_back({seg.t0 + static_cast<double>(i) * seg.step, seg.q_real[i], seg.q_imag[i]});
    }
    return out;
}

std::size_t CorrTable::size() const
{
    std::size_t n = 0;
    for (std::size_t k = 0; k < segments_.size(); ++k)
        n += segments_[k].q_real.size() - (k == 0 ? 0 : 1);
    return n;
}

void CorrTable::write_csv(std::ostream& os) const
{
    os << "t,q_real,q_imag\n";
    char buf[128];
    for (const auto& s : samples()) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", s.t, s.q_real, s.q_imag);
        os << buf;
    }
}

std::function<QValue(double)> make_evaluator(const BathSpec& spec, const Thermal& thermal,
                                             double quad_abs_tol, CorrSource* source)
{
    if (std::holds_alternative<StrictOhmic>(spec))
        throw ParameterError("strict Ohmic bath has a UV-divergent Q(t); a cutoff is required");
    validate(spec);
    if (const auto* s = std::get_if<StructuredEffective>(&spec)) {
        if (s->gamma < kClosedFormGammaRatio * s->omega) {
            if (source)
                *source = CorrSource::ClosedForm;
            const CorrParams p = corr_params(*s, thermal);
            return [p, thermal](double t) { return q_structured(p, thermal, t); };
        }
    }
    if (source)
        *source = CorrSource::Quadrature;
    return [spec, thermal, quad_abs_tol](double t) { return q_quadrature(spec, thermal, t, quad_abs_tol); };
}

CorrTable tabulate(const BathSpec& spec, const Thermal& thermal, const TabulateOptions& opt)
{
    if (std::holds_alternative<StrictOhmic>(spec))
        throw ParameterError("strict Ohmic bath has a UV-divergent Q(t); a cutoff is required");
    validate(spec);

    if (coupling_alpha(spec) == 0.0) {
        CorrTable::Segment seg{0.0, opt.default_t_max, {0.0, 0.0}, {0.0, 0.0}};
        return CorrTable(spec, thermal.temperature(), opt.default_t_max, opt.tol_tail, 0.0,
                         CorrSource::Zero, {seg});
    }

    CorrSource source{};
    const auto eval = make_evaluator(spec, thermal, opt.quad_abs_tol, &source);

    // Smallest t with Q'(t) >= -ln(tol_tail); Q' grows linearly at late times.
    const double target = -std::log(opt.tol_tail);
    double hi = 1.0;
    while (eval(hi).real < target) {
        hi *= 2.0;
        if (hi > opt.t_max_cap)
            throw NumericError("kernel envelope exp(-Q') does not reach " + num(opt.tol_tail)
                               + " before t = " + num(opt.t_max_cap) + " for " + describe(spec));
    }
    double lo = 0.0;
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid).real >= target ? hi : lo) = mid;
    }
    const double t_max = hi;

    double fastest = opt.omega_p_max;
    if (const auto* s = std::get_if<StructuredEffective>(&spec))
        fastest = std::max(fastest, s->omega);
    const double step_cap = 2.0 * kPi / fastest / 16.0;

    std::vector<double> bounds{0.0};
    for (double b = 0.5; b < t_max; b *= 2.0)
        bounds.push_back(b);
    bounds.push_back(t_max);

    std::vector<CorrTable::Segment> segments;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const double a = bounds[k];
        const double len = bounds[k + 1] - a;
        auto n = static_cast<std::size_t>(std::ceil(len / step_cap));
        n = std::max<std::size_t>(n, 8);

        CorrTable::Segment seg;
        seg.t0 = a;
        seg.step = len / static_cast<double>(n);
        seg.q_real.resize(n + 1);
        seg.q_imag.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = (i == n) ? bounds[k + 1] : a + static_cast<double>(i) * seg.step;
            const QValue q = eval(t);
            seg.q_real[i] = q.real;
            seg.q_imag[i] = q.imag;
        }

        for (;;) {
            // Probe every interval midpoint; on failure the probes become
            // the new samples of a grid with half the step.
            std::vector<QValue> mids(n);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = a + (static_cast<double>(i) + 0.5) * seg.step;
                mids[i] = eval(t);
                const QValue ip = interpolate(seg, t);
                err = std::max({err, std::abs(ip.real - mids[i].real), std::abs(ip.imag - mids[i].imag)});
            }
            if (err <= 0.5 * opt.interp_tol) {
                worst = std::max(worst, err);
                break;
            }
            if (seg.step < 1e-7)
                throw NumericError("Q(t) interpolation cannot reach tolerance " + num(opt.interp_tol)
                                   + " near t = " + num(a));
            std::vector<double> re(2 * n + 1), im(2 * n + 1);
            for (std::size_t i = 0; i < n; ++i) {
                re[2 * i] = seg.q_real[i];
                im[2 * i] = seg.q_imag[i];
                re[2 * i + 1] = mids[i].real;
                im[2 * i + 1] = mids[i].imag;
            }
            re[2 * n] = seg.q_real[n];
            im[2 * n] = seg.q_imag[n];
            seg.q_real = std::move(re);
            seg.q_imag = std::move(im);
            seg.step *= 0.5;
            n *= 2;
        }
        segments.push_back(std::move(seg));
    }

    return CorrTable(spec, thermal.temperature(), t_max, opt.tol_tail, worst, source, std::move(segments));
}

} // namespace qtrans
