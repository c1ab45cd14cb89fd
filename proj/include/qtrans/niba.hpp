#pragma once

// Linear response of the driven spin-boson model within the
// noninteracting-blip approximation: kernel functions h+-(t), the
// response kernel integrals, the susceptibility chi(omega_p) and the
// probe transmission T(omega_p).

#include "qtrans/bathcorr.hpp"
#include "qtrans/model.hpp"

#include <complex>
#include <memory>

namespace qtrans {

using cplx = std::complex<double>;

struct HValue {
    double plus = 0.0;
    double minus = 0.0;
    bool tail = false; // t beyond t_max: envelope below tol_tail, reported as zero
};

/// h+(t) = delta^2 exp(-Q'(t)) cos Q''(t), h-(t) = delta^2 exp(-Q'(t)) sin Q''(t).
HValue h_pm(const CorrTable& corr, double delta, double t);

class KernelFunctions {
public:
    KernelFunctions(std::shared_ptr<const CorrTable> corr, double delta);

    HValue operator()(double t) const { return h_pm(*corr_, delta_, t); }

    const CorrTable& table() const { return *corr_; }
    double delta() const { return delta_; }
    double t_max() const { return corr_->t_max(); }
    bool decoupled() const { return corr_->identically_zero(); }

private:
    std::shared_ptr<const CorrTable> corr_;
    double delta_;
};

struct KernelOptions {
    double abs_tol = 1e-9; // in units of delta^2
};

struct StaticKernels {
    double k0_plus = 0.0;
    double k0_minus = 0.0;
};

StaticKernels static_kernels(const KernelFunctions& kf, double eps0, const KernelOptions& opt = {});

/// All first-order response kernels at one probe frequency. The k1
/// kernels are stored per unit probe amplitude; k1_plus() and k1_minus()
/// restore the eps_p prefactor.
struct ResponseKernels {
    double eps0 = 0.0;
    double eps_p = 0.0;
    double omega_p = 0.0;
    double k0_plus = 0.0;
    double k0_minus = 0.0;
    cplx k1_plus_unit{};
    cplx k1_minus_unit{};
    cplx v_plus{};

    cplx k1_plus() const { return eps_p * k1_plus_unit; }
    cplx k1_minus() const { return eps_p * k1_minus_unit; }
};

ResponseKernels response_kernels(const KernelFunctions& kf, double eps0, double eps_p, double omega_p,
                                 const KernelOptions& opt = {});

// Below this magnitude the response denominator i omega_p + v+ is treated
// as singular.
inline constexpr double kDenominatorFloor = 1e-12;

/// chi = [k1- - k1+ k0- / k0+] / (eps_p (i omega_p + v+(omega_p))).
/// The eps_p factor cancels exactly because the unit kernels are used.
cplx susceptibility(const ResponseKernels& rk);

struct ComplexResponse {
    cplx chi{};
    cplx transmission{1.0, 0.0};
    double t_abs2 = 1.0;
};

/// T = 1 - i n_factor omega_p chi.
ComplexResponse transmission(cplx chi, double omega_p, double n_factor);

/// Full pipeline at one probe frequency. A decoupled bath (alpha = 0)
/// gives chi = 0 without integrating the non-decaying kernels.
ComplexResponse probe_response(const KernelFunctions& kf, const SystemParams& sys, double omega_p,
                               const KernelOptions& opt = {});

} // namespace qtrans
