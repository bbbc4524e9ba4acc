#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "wqed/observables.hpp"

namespace wqed::io {

using Json = nlohmann::ordered_json;

// 17 significant digits, scientific; non-finite values as nan / inf / -inf.
std::string format_double(double x);
// Serializes with every floating-point number in format_double form
// (non-finite numbers become null).
std::string dump(const Json& j, bool pretty = true);

Json to_json(cplx z);
Json to_json(const ArrayConfig& cfg);
Json to_json(const ModeMask& mask);
Json to_json(const TimeGrid& grid);
Json to_json(const SingleExcitationSpectrum& sp);
Json to_json(const DoubleExcitationSpectrum& dp);

// Single and double spectra; a non-diagonalizable two-excitation sector is
// reported with its eigenvalues only and "exceptional_point": true.
Json spectrum_report(const ArrayConfig& cfg);

// "# {metadata}" line, header t1,t2,re_coh,im_coh,re_incoh,im_incoh, one row
// per grid point (t1 major).
std::string field_csv(const TwoPhotonField& field);

std::string cut_csv(const std::vector<TwoPhotonField::Sample>& samples, const Json& metadata);

// Header N,phi,T,inv_T,t_max,converged,tail_est.
std::string sweep_csv(const SweepResult& sweep);

}  // namespace wqed::io
