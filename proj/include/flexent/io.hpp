#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "flexent/allocator.hpp"
#include "flexent/counts.hpp"
#include "flexent/flexgrid.hpp"
#include "flexent/metrics.hpp"
#include "flexent/qcore.hpp"
#include "flexent/tomography.hpp"

namespace flexent {

// Shortest representation that parses back to the identical double
// (via std::to_chars), so CSV/JSON round trips are bit-exact.
std::string fmt_double(double v);

// ---- CSV -------------------------------------------------------------
// Readers take a `label` (usually the path) used in error messages, which
// name the offending line and column.

void write_plan_csv(std::ostream& out, const std::vector<ChannelPair>& plan);
std::vector<ChannelPair> read_plan_csv(std::istream& in, const std::string& label);

void write_counts_csv(std::ostream& out, const std::vector<CountRecord>& counts);
std::vector<CountRecord> read_counts_csv(std::istream& in, const std::string& label);

void write_jsi_csv(std::ostream& out, const JsiScan& scan);
JsiScan read_jsi_csv(std::istream& in, const std::string& label);

void write_report_csv(std::ostream& out, const std::vector<EntanglementReport>& reports);
// Rotation matrices are not part of the CSV schema; reread reports carry
// identity placeholders there.
std::vector<EntanglementReport> read_report_csv(std::istream& in, const std::string& label);

void write_requests_csv(std::ostream& out, const std::vector<AllocationRequest>& reqs);
std::vector<AllocationRequest> read_requests_csv(std::istream& in, const std::string& label);

// ---- JSON ------------------------------------------------------------

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& label);

nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j, const std::string& label);

struct ChannelPosterior {
    int k = 0;
    PosteriorSummary summary;
};

nlohmann::json posterior_to_json(const ChannelPosterior& p);
ChannelPosterior posterior_from_json(const nlohmann::json& j, const std::string& label);

nlohmann::json report_to_json(const std::vector<EntanglementReport>& reports);
nlohmann::json allocation_to_json(const AllocationPlan& plan);

// ---- path-level helpers ------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::vector<ChannelPair> load_plan(const std::string& path);
std::vector<CountRecord> load_counts(const std::string& path);
JsiScan load_jsi(const std::string& path);
std::vector<EntanglementReport> load_report(const std::string& path);
std::vector<AllocationRequest> load_requests(const std::string& path);
ChannelPosterior load_posterior(const std::string& path);

} // namespace flexent
