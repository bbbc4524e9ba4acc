// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a
// criterion fails that is not listed as a known failure; known failures still
// print FAIL with the measured values.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wqed/kernels.hpp"
#include "wqed/observables.hpp"
#include "wqed/oracle.hpp"

using namespace wqed;
namespace fs = std::filesystem;

namespace {

// Tolerances
constexpr double kInverseAnalytic = 1e-8;
constexpr double kInverseQuadrature = 1e-6;
constexpr double kTrace = 1e-10;
constexpr double kUnitarity = 1e-10;
constexpr double kCancellation = 1e-8;
constexpr double kOracleRel = 1e-3;
constexpr double kConfluenceRel = 1e-4;
constexpr double kConfluenceSep = 1e-4;
constexpr double kMirrorRel = 1e-3;
constexpr double kProfileRms = 0.15;
constexpr double kEdgeRatio = 2.0;
constexpr double kDecayRel = 0.10;

// Criteria that the implementation does not meet; see README.
const std::vector<std::string> kKnownFailures = {"duration-minimum", "duration-ordering"};

struct Outcome {
    bool pass;
    std::string detail;
};

int unexpected = 0;

void report(const std::string& id, const std::function<Outcome()>& check) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool known = std::find(kKnownFailures.begin(), kKnownFailures.end(), id) != kKnownFailures.end();
    if (!o.pass && !known)
        ++unexpected;
    std::printf("%s %s: %s%s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id.c_str(), o.detail.c_str(),
                !o.pass && known ? " (known failure)" : "", secs);
    std::fflush(stdout);
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

double max_dev_from_identity(const CMatrix& m) {
    return (m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

CMatrix q_for(const ArrayConfig& cfg, cplx eps, bool& resolvent) {
    try {
        resolvent = false;
        return q_matrix(diagonalize_double(cfg), eps);
    } catch (const ExceptionalPoint&) {
        resolvent = true;
        return q_matrix_resolvent(cfg, eps);
    }
}

const std::vector<ArrayConfig> kInverseConfigs = {
    {2, 0.1}, {2, 0.5}, {2, std::numbers::pi / 2}, {3, 0.1}, {3, 0.5},
    {3, std::numbers::pi / 2}, {4, 0.1}, {4, 0.5}, {4, std::numbers::pi / 2}};

Outcome inverse_analytic() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    std::string routes;
    for (const auto& cfg : kInverseConfigs) {
        SingleExcitationSpectrum sp = diagonalize_single(cfg);
        double radius = 5.0 * cfg.n_atoms;
        for (int k = 0; k < 20;) {
            cplx eps = radius * cplx(u(rng), u(rng));
            if (std::abs(eps) >= radius)
                continue;
            ++k;
            bool resolvent = false;
            CMatrix q = q_for(cfg, eps, resolvent);
            worst = std::max(worst, max_dev_from_identity(q * sigma_matrix(sp, eps)));
            if (resolvent && routes.find("N=" + std::to_string(cfg.n_atoms)) == std::string::npos)
                routes += " resolvent Q at N=" + std::to_string(cfg.n_atoms) + " phi=" + sci(cfg.phase) + ";";
        }
    }
    return {worst < kInverseAnalytic, "max|Q Sigma - I| = " + sci(worst) + " < " + sci(kInverseAnalytic) +
                                          " (residue Sigma, 180 draws;" + routes + ")"};
}

Outcome inverse_quadrature() {
    // The real-axis integral represents Sigma only for Im(2 eps) > max Im omega.
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    bool bounded = true;
    for (const auto& cfg : kInverseConfigs) {
        SingleExcitationSpectrum sp = diagonalize_single(cfg);
        double radius = 5.0 * cfg.n_atoms;
        double floor = 0.5 * sp.eigenvalues.imag().maxCoeff() + 0.05;
        for (int k = 0; k < 20;) {
            cplx eps = radius * cplx(u(rng), u(rng));
            if (std::abs(eps) >= radius || eps.imag() <= floor)
                continue;
            ++k;
            bool resolvent = false;
            CMatrix q = q_for(cfg, eps, resolvent);
            MatrixEstimate s = sigma_numeric(cfg, eps);
            double dev = max_dev_from_identity(q * s.value);
            double sigma_dev = (s.value - sigma_matrix(sp, eps)).cwiseAbs().maxCoeff();
            bounded = bounded && sigma_dev <= s.error;
            worst = std::max(worst, dev);
        }
    }
    return {worst < kInverseQuadrature && bounded,
            "max|Q Sigma - I| = " + sci(worst) + " < " + sci(kInverseQuadrature) +
                " (quadrature Sigma, 180 draws with Im 2eps > max Im omega); error estimates bound Sigma: " +
                (bounded ? "yes" : "no")};
}

Outcome trace_identities() {
    double worst_single = 0.0, worst_double = 0.0;
    for (int n = 1; n <= 8; ++n) {
        for (int k = 0; k < 20; ++k) {
            ArrayConfig cfg{n, 0.05 + k * (std::numbers::pi - 0.1) / 19.0};
            worst_single = std::max(worst_single, std::abs(diagonalize_single(cfg).eigenvalues.imag().sum() + n));
            if (n < 2)
                continue;
            // trace of the pair Hamiltonian equals the sum of 2 eps over any spectrum, defective or not
            Eigen::ComplexEigenSolver<CMatrix> es(build_pair_hamiltonian(cfg), false);
            double sum = 0.5 * es.eigenvalues().imag().sum();
            worst_double = std::max(worst_double, std::abs(sum + 0.5 * n * (n - 1)));
        }
    }
    double worst = std::max(worst_single, worst_double);
    return {worst < kTrace, "max deviation single " + sci(worst_single) + ", double " + sci(worst_double) + " < " +
                                sci(kTrace) + " (N=1..8, 20 phases)"};
}

Outcome unitarity() {
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n)
        for (double phi : {0.1, 0.7, std::numbers::pi / 2, 2.5})
            for (int k = 0; k < 100; ++k) {
                double w = -10.0 + 20.0 * (k + 0.5) / 100.0;
                ArrayConfig cfg{n, phi};
                worst = std::max(worst, std::abs(std::norm(transmission(cfg, w)) + std::norm(reflection(cfg, w)) - 1.0));
            }
    return {worst < kUnitarity, "max||t|^2 + |r|^2 - 1| = " + sci(worst) + " < " + sci(kUnitarity) +
                                    " (N=1..6, 4 phases, 100 frequencies in [-10, 10])"};
}

Outcome cancellation() {
    PulseModel m = PulseModel::build({1, 0.3});
    double sum = 0.0, closed = 0.0;
    for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
            double t1 = 0.25 * i, t2 = 0.25 * j;
            cplx inc = m.incoherent(t1, t2);
            sum = std::max(sum, std::abs(m.coherent(t1, t2) + inc));
            closed = std::max(closed, std::abs(inc + std::exp(-(t1 + t2))));
        }
    return {sum < kCancellation && closed < kCancellation,
            "max|y y + psi_incoh| = " + sci(sum) + ", max|psi_incoh + e^-(t1+t2)| = " + sci(closed) + " < " +
                sci(kCancellation) + " (20x20 grid on (0,5]^2)"};
}

Outcome oracle_equivalence(const ArrayConfig& cfg, std::uint64_t seed) {
    PulseModel model = PulseModel::build(cfg);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    bool bounded = true;
    for (int k = 0; k < 10; ++k) {
        double t1 = 0.2 + 4.8 * (1.0 - u(rng)), t2 = 0.2 + 4.8 * (1.0 - u(rng));
        ScalarEstimate e = psi_incoherent_numeric(cfg, t1, t2);
        double diff = std::abs(model.incoherent(t1, t2) - e.value);
        worst = std::max(worst, diff / std::abs(e.value));
        bounded = bounded && diff <= e.error;
    }
    return {worst < kOracleRel && bounded,
            "N=" + std::to_string(cfg.n_atoms) + " phi=" + sci(cfg.phase) + ": max relative error " + sci(worst) +
                " < " + sci(kOracleRel) + " at 10 points; error estimates bound it: " + (bounded ? "yes" : "no")};
}

Outcome kernel_confluence() {
    // Two readings, both at the same tolerance: (a) confluent and generic
    // forms at one point separated by 1e-4 from coincidence, (b) the value at
    // coincidence against the symmetric average of the generic form at +-1e-4.
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-3.0, -0.05), t(0.05, 5.0), ang(0.0, 2 * std::numbers::pi);
    auto draw = [&] { return cplx(re(rng), im(rng)); };
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::abs(b); };
    double same = 0.0, limit = 0.0;
    for (int k = 0; k < 50; ++k) {
        cplx a = draw(), b = draw(), s = draw();
        double t1 = t(rng), t2 = t(rng);
        cplx mean = 0.5 * (a + b);
        cplx d = std::polar(kConfluenceSep, ang(rng)), e = std::polar(kConfluenceSep, ang(rng));
        cplx near = mean + d, near_s = near + e;
        same = std::max({same, rel(detail::kernel_L_confluent(a, b, near, t1, t2), detail::kernel_L_generic(a, b, near, t1, t2)),
                         rel(detail::kernel_M_confluent(a, b, near, s, t1, t2), detail::kernel_M_generic(a, b, near, s, t1, t2)),
                         rel(detail::kernel_M_confluent(a, b, near, near_s, t1, t2),
                             detail::kernel_M_generic(a, b, near, near_s, t1, t2))});
        auto L = [&](cplx r) { return detail::kernel_L_generic(a, b, r, t1, t2); };
        auto M = [&](cplx r, cplx q) { return detail::kernel_M_generic(a, b, r, q, t1, t2); };
        limit = std::max({limit, rel(kernel_L(a, b, mean, t1, t2), 0.5 * (L(mean + d) + L(mean - d))),
                          rel(kernel_M(a, b, mean, s, t1, t2), 0.5 * (M(mean + d, s) + M(mean - d, s))),
                          rel(kernel_M(a, b, s, s, t1, t2), 0.5 * (M(s + d, s + e) + M(s - d, s - e))),
                          rel(kernel_M(a, b, mean, mean, t1, t2), 0.5 * (M(mean + d, mean + e) + M(mean - d, mean - e)))});
    }
    return {same < kConfluenceRel && limit < kConfluenceRel,
            "50 draws at separation " + sci(kConfluenceSep) + ": same-point relative gap " + sci(same) +
                ", coincidence vs symmetric limit " + sci(limit) + " < " + sci(kConfluenceRel)};
}

Outcome spectrum_classes() {
    ArrayConfig cfg{4, 0.1};
    SingleExcitationSpectrum sp = diagonalize_single(cfg);
    DoubleExcitationSpectrum dp = diagonalize_double(cfg);
    int single_super = 0, super = 0, dark = 0, twilight = 0;
    for (int k = 0; k < sp.size(); ++k) {
        double g = -sp.eigenvalues(k).imag();
        single_super += g >= 2.0 && g <= 4.5;
    }
    for (int k = 0; k < dp.size(); ++k) {
        double rate = -2.0 * dp.eigenvalues(k).imag();
        super += rate > 3.0;
        dark += rate < 0.2;
        twilight += rate >= 0.3 && rate <= 3.0;
    }
    std::ostringstream s;
    s << "single superradiant " << single_super << "/1, double superradiant " << super << "/1, dark " << dark
      << "/2, twilight " << twilight << "/3";
    return {single_super == 1 && super == 1 && dark == 2 && twilight == 3, s.str()};
}

struct SweepData {
    std::vector<double> phi;
    std::vector<std::vector<double>> inv_t;  // [N - 2][phi]
    std::vector<double> at_005;              // 1/T(0.05) for N = 2..5
    bool all_converged = true;
};

const SweepData& sweep_data() {
    static SweepData d = [] {
        SweepData out;
        const double lo = 0.02, hi = std::numbers::pi - 0.02;
        for (int k = 0; k < 100; ++k)
            out.phi.push_back(lo + (hi - lo) * k / 99.0);
        SweepResult sw = duration_sweep({2, 3, 4, 5}, out.phi);
        out.inv_t.assign(4, std::vector<double>(out.phi.size()));
        for (const auto& r : sw.rows) {
            auto it = std::find(out.phi.begin(), out.phi.end(), r.phase);
            out.inv_t[r.n_atoms - 2][it - out.phi.begin()] = r.result.inverse_T;
            out.all_converged = out.all_converged && r.status == 0;
        }
        for (int n = 2; n <= 5; ++n)
            out.at_005.push_back(pulse_duration(ArrayConfig{n, 0.05}).inverse_T);
        return out;
    }();
    return d;
}

Outcome duration_minimum() {
    const SweepData& d = sweep_data();
    double step = d.phi[1] - d.phi[0];
    bool ok = d.all_converged;
    std::ostringstream s;
    s << "argmin of 1/T on the 100-point grid:";
    for (int n = 2; n <= 5; ++n) {
        const auto& v = d.inv_t[n - 2];
        std::size_t k = std::min_element(v.begin(), v.end()) - v.begin();
        bool here = std::abs(d.phi[k] - std::numbers::pi / 2) <= step;
        ok = ok && here;
        s << " N=" << n << " phi=" << sci(d.phi[k]) << " (1/T=" << sci(v[k]) << ")";
    }
    s << "; required within " << sci(step) << " of pi/2";
    return {ok, s.str()};
}

Outcome duration_ordering() {
    const SweepData& d = sweep_data();
    bool ok = true;
    std::ostringstream s;
    s << "1/T(phi=0.05) for N=2..5:";
    for (std::size_t k = 0; k < d.at_005.size(); ++k) {
        s << ' ' << sci(d.at_005[k]);
        if (k > 0)
            ok = ok && d.at_005[k] > d.at_005[k - 1];
    }
    s << "; required strictly increasing";
    return {ok, s.str()};
}

Outcome duration_mirror() {
    const SweepData& d = sweep_data();
    double worst = 0.0;
    for (const auto& v : d.inv_t)
        for (std::size_t k = 0; k < v.size(); ++k)
            worst = std::max(worst, std::abs(v[k] - v[v.size() - 1 - k]) / v[k]);
    return {worst < kMirrorRel && d.all_converged,
            "max relative |T(phi) - T(pi - phi)| = " + sci(worst) + " < " + sci(kMirrorRel) +
                " (N=2..5, 100 phases); all windows converged: " + (d.all_converged ? "yes" : "no")};
}

Outcome mode_profile() {
    Spectra s = Spectra::compute({4, 0.1});
    PulseModel full(s, ModeMask::full(4, 6)), bright(s, ModeMask::superradiant_only(4, 6));
    std::vector<double> a, b;
    for (int k = 0; k <= 100; ++k) {
        double d = -0.5 + 0.01 * k, t1 = 0.5 * (10.0 + d), t2 = 0.5 * (10.0 - d);
        a.push_back(std::abs(full.incoherent(t1, t2)));
        b.push_back(std::abs(bright.incoherent(t1, t2)));
    }
    double ma = *std::max_element(a.begin(), a.end()), mb = *std::max_element(b.begin(), b.end());
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        sq += std::pow(a[k] / ma - b[k] / mb, 2);
    double rms = std::sqrt(sq / a.size());
    return {rms < kProfileRms, "RMS of normalized |psi_incoh| profiles (full vs superradiant-only) on t1+t2=10, "
                               "|t1-t2|<0.5: " + sci(rms) + " < " + sci(kProfileRms)};
}

Outcome mode_edge() {
    Spectra s = Spectra::compute({4, 0.1});
    PulseModel full(s, ModeMask::full(4, 6)), bright(s, ModeMask::superradiant_only(4, 6));
    double ratio = std::abs(full.incoherent(5.0, 0.2)) / std::abs(bright.incoherent(5.0, 0.2));
    return {ratio > kEdgeRatio, "|psi_full| / |psi_superradiant| at (5, 0.2) = " + sci(ratio) + " > " + sci(kEdgeRatio)};
}

Outcome mode_decay() {
    Spectra s = Spectra::compute({4, 0.1});
    const auto& w = s.single.eigenvalues;
    const auto& e = s.pairs.eigenvalues;
    double predicted = std::numeric_limits<double>::infinity();
    for (int a = 0; a < w.size(); ++a)
        for (int b = 0; b < w.size(); ++b)
            predicted = std::min(predicted, 2.0 * std::abs((w(a) + w(b)).imag()));
    for (int k = 0; k < e.size(); ++k)
        predicted = std::min(predicted, 2.0 * std::abs(2.0 * e(k).imag()));

    // Fit window: every faster diagonal term of psi_incoh, weighted by its
    // largest coefficient, is below e^-5 of the slowest one in amplitude.
    PulseModel full(s, ModeMask::full(4, 6));
    const WedgeExpansion& psi = full.incoherent_expansion();
    std::vector<double> weight(psi.beta.size(), 0.0);
    for (const auto& t : psi.terms)
        weight[t.b] = std::max(weight[t.b], std::abs(t.coeff));
    std::size_t slow = 0;
    for (std::size_t b = 0; b < psi.beta.size(); ++b)
        if (weight[b] > 0.0 && (weight[slow] == 0.0 || psi.beta[b].imag() > psi.beta[slow].imag()))
            slow = b;
    double r_slow = -4.0 * psi.beta[slow].imag(), t0 = 0.0;
    for (std::size_t b = 0; b < psi.beta.size(); ++b) {
        double r = -4.0 * psi.beta[b].imag();
        if (b != slow && weight[b] > 0.0 && r > r_slow)
            t0 = std::max(t0, 2.0 * (5.0 + std::log(weight[b] / weight[slow])) / (r - r_slow));
    }

    const int n = 50;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
        double t = t0 * (1.0 + double(k) / (n - 1));
        double y = std::log(std::norm(full.incoherent(t, t)));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    double fitted = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    double dev = std::abs(fitted - predicted) / predicted;
    return {dev < kDecayRel, "fitted |psi_incoh|^2 diagonal decay " + sci(fitted) + " on t in [" + sci(t0) + ", " +
                                 sci(2 * t0) + "] vs slowest pole rate " + sci(predicted) +
                                 ": relative deviation " + sci(dev) + " < " + sci(kDecayRel)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    fs::path dir = fs::temp_directory_path() / ("wqed_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::string> commands = {
        "spectrum --n 4 --phi 0.1",
        "pulse --n 4 --phi 0.1 --tmax 4 --steps 160",
        "cut --n 4 --phi 0.1 --kind antidiagonal --value 10 --tmax 10 --steps 400 --mask-single bright",
        "sweep --n-list 2,3 --phi-steps 7",
        "oracle-check --n 2 --phi 0.5 --samples 1 --seed 7",
    };
    bool ok = true;
    int files = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            fs::path out = dir / ("run" + std::to_string(c) + "_" + std::to_string(rep));
            std::string cmd = std::string(WQED_CLI_PATH) + " " + commands[c] + " --out " + out.string();
            int status = std::system(cmd.c_str());
            ok = ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
            std::string body = slurp(out);
            if (rep == 0)
                first = body;
            else
                ok = ok && !body.empty() && body == first;
        }
        ++files;
    }
    fs::remove_all(dir);
    return {ok, std::to_string(files) + " subcommands run twice: outputs byte-identical and exit 0"};
}

}  // namespace

int main() {
    report("inverse-identity-analytic", inverse_analytic);
    report("inverse-identity-quadrature", inverse_quadrature);
    report("trace-identities", trace_identities);
    report("unitarity", unitarity);
    report("single-atom-cancellation", cancellation);
    report("oracle-equivalence-N2", [] { return oracle_equivalence({2, 0.5}, 201); });
    report("oracle-equivalence-N3", [] { return oracle_equivalence({3, 0.1}, 202); });
    report("oracle-equivalence-N4", [] { return oracle_equivalence({4, 0.1}, 203); });
    report("kernel-confluence", kernel_confluence);
    report("spectrum-classes", spectrum_classes);
    report("duration-minimum", duration_minimum);
    report("duration-ordering", duration_ordering);
    report("duration-mirror", duration_mirror);
    report("mode-profile", mode_profile);
    report("mode-edge-tail", mode_edge);
    report("mode-diagonal-decay", mode_decay);
    report("cli-determinism", determinism);
    std::printf("%d unexpected failure(s)\n", unexpected);
    return unexpected == 0 ? 0 : 1;
}
