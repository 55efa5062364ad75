#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "nlbvp/classifier.hpp"
#include "nlbvp/consistency.hpp"
#include "nlbvp/kernels.hpp"
#include "nlbvp/pencil.hpp"
#include "nlbvp/witness.hpp"

// JSON and CSV renderings of reports. CSV numbers use 17 significant
// digits; JSON numbers use the shortest exact round-trip form and non-finite
// values become null.
namespace nlbvp::io {

using OJson = nlohmann::ordered_json;

std::string num(double x);

OJson to_json(const pencil::SpectralReport& r);
/// re,im,multiplicity,partial_multiplicities,proper,ambiguous,polynomial_residual
std::string eigenvalues_csv(const pencil::SpectralReport& r);

OJson to_json(const consistency::DiagnosticResult& d);
OJson to_json(const consistency::BetaTable& b);
OJson to_json(const consistency::ConsistencyReport& r);
OJson to_json(const consistency::CoefficientReport& r);

OJson to_json(const classifier::SingularWitness& w);
/// omega,angle,then re/im of every phi^(l)
std::string witness_profiles_csv(const classifier::SingularWitness& w, int count = 129);
/// r,omega,angle,f0
std::string witness_forcing_csv(const classifier::SingularWitness& w);

OJson to_json(const classifier::Obligation& o);
OJson to_json(const classifier::Verdict& v);
std::string describe(const classifier::Verdict& v);

/// condition,orbit,row_angle,row_sigma,m,r_m,I_m; one row per dyadic level of each entry.
std::string levels_csv_header();
std::string levels_csv(const std::vector<consistency::ConsistencyEntry>& entries, int orbit_id);

/// s,n_eigenvalues,im_lambda_min,case_label,count,proper,oracle_im; one row per s.
std::string sweep_csv(const std::vector<kernels::SweepRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const OJson& j);

}  // namespace nlbvp::io
