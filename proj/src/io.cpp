#include "wqed/io.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace wqed::io {

std::string format_double(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

void emit(const Json& j, std::string& out, bool pretty, int depth) {
    auto newline = [&](int d) {
        if (pretty) {
            out += '\n';
            out.append(std::size_t(2 * d), ' ');
        }
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += pretty ? ": " : ":";
            emit(it.value(), out, pretty, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        // arrays of scalars stay on one line
        bool flat = true;
        for (const auto& v : j)
            flat = flat && !v.is_structured();
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first)
                out += pretty && flat ? ", " : ",";
            first = false;
            if (!flat)
                newline(depth + 1);
            emit(v, out, pretty, depth + 1);
        }
        if (!flat)
            newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float: {
        double x = j.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

Json complex_array(const CVector& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k)
        a.push_back(to_json(v(k)));
    return a;
}

// one inner array per column
Json column_arrays(const CMatrix& m) {
    Json a = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        a.push_back(complex_array(m.col(c)));
    return a;
}

}  // namespace

std::string dump(const Json& j, bool pretty) {
    std::string out;
    emit(j, out, pretty, 0);
    return out;
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ArrayConfig& cfg) {
    return Json{{"n_atoms", cfg.n_atoms}, {"phase", cfg.phase}, {"gamma_1d", cfg.gamma_1d}, {"omega_0", cfg.omega_0}};
}

Json to_json(const ModeMask& mask) { return Json{{"single", mask.single}, {"double", mask.pairs}}; }

Json to_json(const TimeGrid& grid) {
    Json j{{"kind", grid.kind == TimeGrid::Kind::Uniform ? "uniform" : "geometric"},
           {"t_max", grid.t_max},
           {"steps", grid.steps}};
    if (grid.kind == TimeGrid::Kind::Geometric)
        j["t_min"] = grid.t_min;
    return j;
}

Json to_json(const SingleExcitationSpectrum& sp) {
    // s_plus[nu][j] = s_j^{+,nu}
    return Json{{"omega", complex_array(sp.eigenvalues)},
                {"modes", column_arrays(sp.eigenvectors)},
                {"s_plus", column_arrays(sp.coupling_plus)},
                {"s_minus", column_arrays(sp.coupling_minus)},
                {"t_res", complex_array(sp.transmission_residues)}};
}

Json to_json(const DoubleExcitationSpectrum& dp) {
    Json basis = Json::array();
    for (auto [m, n] : dp.pair_basis)
        basis.push_back(Json::array({m, n}));
    return Json{{"epsilon", complex_array(dp.eigenvalues)},
                {"pair_basis", basis},
                {"psi", column_arrays(dp.eigenvectors)},
                {"d", column_arrays(dp.emission.transpose())}};
}

Json spectrum_report(const ArrayConfig& cfg) {
    cfg.validate();
    Json j;
    j["config"] = to_json(cfg);
    j["single"] = to_json(diagonalize_single(cfg));
    if (cfg.n_atoms < 2) {
        j["double"] = to_json(DoubleExcitationSpectrum::empty(cfg));
        return j;
    }
    try {
        j["double"] = to_json(diagonalize_double(cfg));
    } catch (const ExceptionalPoint&) {
        Eigen::ComplexEigenSolver<CMatrix> es(build_pair_hamiltonian(cfg), false);
        CVector eps = es.eigenvalues() / 2.0;
        std::sort(eps.data(), eps.data() + eps.size(), [](cplx a, cplx b) {
            return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
        });
        Json basis = Json::array();
        for (auto [m, n] : make_pair_basis(cfg.n_atoms))
            basis.push_back(Json::array({m, n}));
        j["double"] = Json{{"epsilon", complex_array(eps)},
                           {"pair_basis", basis},
                           {"psi", nullptr},
                           {"d", nullptr},
                           {"exceptional_point", true}};
    }
    return j;
}

std::string field_csv(const TwoPhotonField& f) {
    Json meta{{"config", to_json(f.config)},
              {"mask", to_json(f.mask)},
              {"grid", to_json(f.grid)},
              {"delta", Json{{"delta_delta_weight", to_json(f.delta_delta_weight)},
                             {"cross_terms", f.delta_cross_terms}}},
              {"warnings", f.warnings}};
    std::string out = "# " + dump(meta, false) + "\n";
    out += "t1,t2,re_coh,im_coh,re_incoh,im_incoh\n";
    const std::size_t n = f.times.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx c = f.coherent(i, j), u = f.incoherent(i, j);
            out += format_double(f.times[i]) + ',' + format_double(f.times[j]) + ',' + format_double(c.real()) +
                   ',' + format_double(c.imag()) + ',' + format_double(u.real()) + ',' + format_double(u.imag()) +
                   '\n';
        }
    }
    return out;
}

std::string cut_csv(const std::vector<TwoPhotonField::Sample>& samples, const Json& metadata) {
    std::string out = "# " + dump(metadata, false) + "\n";
    out += "coord,t1,t2,re_coh,im_coh,re_incoh,im_incoh,abs_incoh,prob_incoh,abs_total,prob_total\n";
    for (const auto& s : samples) {
        cplx tot = s.coherent + s.incoherent;
        double v[] = {s.coord,
                      s.t1,
                      s.t2,
                      s.coherent.real(),
                      s.coherent.imag(),
                      s.incoherent.real(),
                      s.incoherent.imag(),
                      std::abs(s.incoherent),
                      std::norm(s.incoherent),
                      std::abs(tot),
                      std::norm(tot)};
        for (std::size_t k = 0; k < std::size(v); ++k) {
            if (k)
                out += ',';
            out += format_double(v[k]);
        }
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "N,phi,T,inv_T,t_max,converged,tail_est\n";
    for (const auto& r : sweep.rows) {
        out += std::to_string(r.n_atoms) + ',' + format_double(r.phase) + ',' + format_double(r.result.T) + ',' +
               format_double(r.result.inverse_T) + ',' + format_double(r.result.t_max) + ',' +
               (r.result.converged ? "1" : "0") + ',' + format_double(r.result.tail_estimate) + '\n';
    }
    return out;
}

}  // namespace wqed::io
