#pragma once

#include <string>
#include <vector>

#include "wqed/double_excitation.hpp"

namespace wqed {

struct Spectra {
    SingleExcitationSpectrum single;
    DoubleExcitationSpectrum pairs;  // empty for N = 1

    static Spectra compute(const ArrayConfig& cfg);
};

// Which collective modes contribute. Indices are 0-based positions in the
// sorted spectra (single modes: fastest decay first).
struct ModeMask {
    std::vector<int> single;
    std::vector<int> pairs;

    static ModeMask full(int n_single, int n_pairs);
    // Brightest single mode plus every two-excitation mode.
    static ModeMask superradiant_only(int n_single, int n_pairs);
    void validate(int n_single, int n_pairs) const;
    bool empty() const { return single.empty(); }
};

// Smooth part of the single-photon transmitted amplitude,
// y(t) = -i theta(t) sum_mu t_mu exp(-i omega_mu t). The forward delta(t)
// from t(omega -> inf) = 1 is not included.
cplx coherent_smooth(const SingleExcitationSpectrum& sp, double t);
cplx coherent_smooth(const SingleExcitationSpectrum& sp, double t, const ModeMask& mask);

// Coefficients of the incoherent part. (nu, mu) is the incoming pair r with
// pole eps_r = (omega_nu + omega_mu) / 2; kappa labels the two-excitation pole.
cplx pair_coupling_U(const SingleExcitationSpectrum& sp, int i, int nu, int mu);
cplx pair_coupling_V(const SingleExcitationSpectrum& sp, const DoubleExcitationSpectrum& dp, int i,
                     int nu, int mu, int kappa);

// Analytic f_j(E) = i sum_{nu,mu} s_j^{+nu} s_j^{+mu} / (omega_nu + omega_mu - E).
CVector f_integral(const SingleExcitationSpectrum& sp, cplx energy);
// u_i(eps) = sum_j Q_ij(eps) f_j(2 eps), and the same from the U and V couplings.
CVector u_coefficient(const Spectra& s, cplx eps);
CVector u_coefficient_from_couplings(const Spectra& s, cplx eps);

// Direct kernel sum over all masked modes. Slow; serves as the reference
// for the exponential-sum evaluator.
cplx incoherent_wavefunction(const Spectra& s, double t1, double t2, const ModeMask& mask);

// psi(t1, t2) on the wedge t1 >= t2 written as
//   sum_k c_k sigma^p_k exp(-i alpha_{a_k} tau - 2i beta_{b_k} sigma),
// tau = t1 - t2, sigma = t2. Every alpha and beta has negative imaginary part.
struct WedgeExpansion {
    struct Term {
        int a;
        int b;
        int power;
        cplx coeff;
    };
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    std::vector<Term> terms;

    cplx operator()(double t1, double t2) const;
    // Exponentially slowest rate of |psi|^2 along the diagonal among terms
    // with |coeff| above rel_cut * max |coeff|.
    double slowest_diagonal_rate(double rel_cut = 0.0) const;
    void append(const WedgeExpansion& other);
};

// Precomputed evaluator for one configuration and mask.
class PulseModel {
  public:
    PulseModel(const Spectra& spectra, ModeMask mask);
    static PulseModel build(const ArrayConfig& cfg);

    cplx coherent(double t1, double t2) const { return coherent_(t1, t2); }
    cplx incoherent(double t1, double t2) const { return incoherent_(t1, t2); }
    cplx smooth(double t1, double t2) const { return coherent_(t1, t2) + incoherent_(t1, t2); }

    const Spectra& spectra() const { return spectra_; }
    const ModeMask& mask() const { return mask_; }
    const WedgeExpansion& coherent_expansion() const { return coherent_; }
    const WedgeExpansion& incoherent_expansion() const { return incoherent_; }
    WedgeExpansion smooth_expansion() const;

  private:
    Spectra spectra_;
    ModeMask mask_;
    WedgeExpansion coherent_;
    WedgeExpansion incoherent_;
};

struct TimeGrid {
    enum class Kind { Uniform, Geometric };
    Kind kind = Kind::Uniform;
    double t_max = 10.0;
    int steps = 100;
    double t_min = 1e-2;  // first nonzero point of a geometric grid

    std::vector<double> points() const;
    double max_step() const;
};

struct TwoPhotonField {
    ArrayConfig config;
    TimeGrid grid;
    ModeMask mask;
    std::vector<double> times;
    CMatrix coherent;    // (i, j) at (times[i], times[j])
    CMatrix incoherent;
    // Singular parts kept out of the samples: weight of delta(t1) delta(t2),
    // and whether delta(t1) y(t2) + y(t1) delta(t2) cross terms are present.
    cplx delta_delta_weight = 1.0;
    bool delta_cross_terms = true;
    std::vector<std::string> warnings;

    struct Sample {
        double coord;
        double t1;
        double t2;
        cplx coherent;
        cplx incoherent;
    };
    std::vector<Sample> diagonal() const;
    std::vector<Sample> edge(double t2) const;         // nearest grid row
    std::vector<Sample> antidiagonal(double sum) const;  // grid points with t1 + t2 ~ sum
};

// Parallel over grid rows; each unordered pair is evaluated once.
TwoPhotonField wavefunction_grid(const PulseModel& model, const TimeGrid& grid);
TwoPhotonField wavefunction_grid(const ArrayConfig& cfg, const TimeGrid& grid, const ModeMask* mask = nullptr);
// Serial direct kernel sum, for testing and benchmarking.
TwoPhotonField wavefunction_grid_reference(const Spectra& s, const ModeMask& mask, const TimeGrid& grid);

enum class CutKind { Diagonal, Antidiagonal, Edge };

// Diagonal: t1 = t2 = x, x in [0, extent]. Edge: t2 = value, t1 = x in
// [0, extent]. Antidiagonal: t1 + t2 = value, x = t1 - t2 in [-extent, extent]
// clipped to the quadrant.
std::vector<TwoPhotonField::Sample> evaluate_cut(const PulseModel& model, CutKind kind, double value,
                                                 double extent, int steps);

}  // namespace wqed
