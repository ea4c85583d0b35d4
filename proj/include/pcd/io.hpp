#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pcd/graph.hpp"
#include "pcd/pipeline.hpp"

namespace pcd {

constexpr const char* kReportSchema = "pcd-report/1";

// Malformed or inconsistent input file.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Instance {
    MultiGraph g;
    std::optional<ClusterPartition> part;
};

// "n m", one "u v" per edge, then optionally "#partition" with "V0: ..." and "Vi: ..." lines.
std::string write_instance(const MultiGraph& g, const ClusterPartition* part = nullptr);
Instance read_instance(const std::string& text);

// One part per line: "path <start>: e1 e2 ..." or "cycle <start>: ...", plus "leftover: ...".
std::string write_decomposition(const Decomposition& d);
Decomposition read_decomposition(const MultiGraph& g, const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

nlohmann::json to_json(const Rational& r);
nlohmann::json to_json(const Walk& w);
nlohmann::json to_json(const Decomposition& d);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const DecomposeResult& r);
nlohmann::json to_json(const AuditEntry& a);
nlohmann::json to_json(const QuasiResult& q);
nlohmann::json to_json(const PartitionReport& r);

// Report envelope: schema, command and seed around a payload.
nlohmann::json report(const std::string& command, std::uint64_t seed, nlohmann::json payload);

// Graph with the parts of d coloured in order; leftover edges dashed.
std::string to_dot(const MultiGraph& g, const Decomposition* d = nullptr, const ClusterPartition* part = nullptr);

}  // namespace pcd
