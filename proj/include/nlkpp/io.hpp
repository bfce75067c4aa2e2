#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlkpp/dynamics.hpp"
#include "nlkpp/env.hpp"
#include "nlkpp/fronts.hpp"
#include "nlkpp/kernel.hpp"
#include "nlkpp/speed.hpp"
#include "nlkpp/verify.hpp"

namespace nlkpp::io {

using json = nlohmann::json;

/// Finite values as numbers; ±inf and nan as the strings "inf", "-inf", "nan".
json number(double v);
/// Inverse of number(); also accepts plain numbers.
double to_double(const json& j);

/// Two-column numeric CSV; a non-numeric first line is treated as a header.
std::vector<std::pair<double, double>> read_two_column_csv(const std::filesystem::path& path);

/// {family, params, scale}. Tabulated params take {y0, dy, values} or {csv: path}
/// (relative paths resolve against base_dir).
KernelSpec kernel_from_json(const json& j, const std::filesystem::path& base_dir = {});
json kernel_to_json(const KernelSpec& k);

/// {form, params, horizon}. Tabulated params take {t0, dt, values} or {csv: path}.
Coefficient coefficient_from_json(const json& j, const std::filesystem::path& base_dir = {});
json coefficient_to_json(const Coefficient& c);

InitialData initial_from_json(const json& j);
json initial_to_json(const InitialData& d);

json to_json(const LeastMeanEstimate& e);
json to_json(const AssumptionReport& r);
json to_json(const SpeedFit& f);
json to_json(const Verdict& v);
json to_json(const ResidualReport& r);
json to_json(const CertificateResult& r);
json to_json(const ComparisonReport& r);
json to_json(const PositivityReport& r);
json to_json(const PersistenceReport& r);
json speed_summary(const SpeedCurve& c);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

void write_speed_curve_csv(const std::filesystem::path& path, const SpeedCurve& c);
/// Rows (t, theta, X).
void write_fronts_csv(const std::filesystem::path& path, const std::vector<FrontTrace>& traces);
/// Rows (t, upper, upper_plus_eta, lower, X) for the primary trace.
void write_envelope_csv(const std::filesystem::path& path, const Envelope& env, double eta, const FrontTrace& trace);

/// Rows (t, x, u) for each snapshot.
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Field>& snaps);
/// Little-endian doubles: for each snapshot t followed by n values. The JSON
/// sidecar carries the grid and `metadata`.
void write_snapshots_binary(const std::filesystem::path& path, const std::vector<Field>& snaps, const json& metadata);
std::vector<Field> read_snapshots_binary(const std::filesystem::path& path);

}  // namespace nlkpp::io
