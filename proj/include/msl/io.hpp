#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msl/dcmm.hpp"
#include "msl/estimator.hpp"

namespace msl {

// Shortest exact decimal for round-trippable, byte-stable output.
std::string format_double(double v);

// Edge list: one "i j" pair per line, 0-indexed, i < j, blank lines ignored.
void write_edge_list(const std::string& path, const AdjacencyMatrix& a);
// n_hint overrides the inferred node count (max index + 1).
AdjacencyMatrix read_edge_list(const std::string& path, int n_hint = -1);

// Ground-truth membership CSV: header "node,pi_1,...,pi_K".
void write_membership_csv(const std::string& path, const Matrix& pi);
Matrix read_membership_csv(const std::string& path);

// Estimate CSV: header "node,flag,pi_1,...,pi_K".
void write_estimate_csv(const std::string& path, const MembershipEstimate& est);
std::pair<Matrix, std::vector<std::string>> read_estimate_csv(const std::string& path);

// Theta CSV: header "node,theta".
void write_theta_csv(const std::string& path, const DegreeParams& theta);
DegreeParams read_theta_csv(const std::string& path);

std::string node_flag_name(NodeFlag flag);

// Flat "key = value" config with [section] headers and '#' comments. Consumers
// must reject unknown keys.
using ConfigSection = std::map<std::string, std::string>;
std::map<std::string, ConfigSection> parse_config_text(const std::string& text);
std::map<std::string, ConfigSection> parse_config_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace msl
