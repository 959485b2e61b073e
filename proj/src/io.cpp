#include "msl/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msl {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_edge_list(const std::string& path, const AdjacencyMatrix& a) {
    std::ostringstream os;
    for (int j = 0; j < a.n; ++j)
        for (int i = 0; i < j; ++i)
            if (a.edges(i, j) != 0.0) os << i << " " << j << "\n";
    write_text_file(path, os.str());
}

AdjacencyMatrix read_edge_list(const std::string& path, int n_hint) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int max_node = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool blank = true;
        for (char ch : line)
            blank &= std::isspace(static_cast<unsigned char>(ch)) != 0;
        if (blank) continue;
        std::istringstream ls(line);
        long i = -1, j = -1;
        if (!(ls >> i >> j)) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 'i j'";
            throw IoError(os.str());
        }
        std::string rest;
        if (ls >> rest) {
            std::ostringstream os;
            os << path << ":" << lineno << ": trailing content '" << rest << "'";
            throw IoError(os.str());
        }
        if (i < 0 || j < 0 || i >= j) {
            std::ostringstream os;
            os << path << ":" << lineno << ": need 0 <= i < j";
            throw IoError(os.str());
        }
        edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
        max_node = std::max(max_node, static_cast<int>(j));
    }
    const int n = n_hint > 0 ? n_hint : max_node + 1;
    if (n <= 0) throw IoError(path + ": empty edge list and no node count given");
    if (max_node >= n) throw IoError(path + ": node index exceeds node count");
    Matrix m = Matrix::Zero(n, n);
    for (auto [i, j] : edges) {
        m(i, j) = 1.0;
        m(j, i) = 1.0;
    }
    return AdjacencyMatrix::from_edges(std::move(m));
}

void write_membership_csv(const std::string& path, const Matrix& pi) {
    std::ostringstream os;
    os << "node";
    for (int c = 0; c < pi.cols(); ++c) os << ",pi_" << c + 1;
    os << "\n";
    for (int i = 0; i < pi.rows(); ++i) {
        os << i;
        for (int c = 0; c < pi.cols(); ++c) os << "," << format_double(pi(i, c));
        os << "\n";
    }
    write_text_file(path, os.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Matrix read_membership_csv(const std::string& path) {
    auto [pi, flags] = read_estimate_csv(path);
    (void)flags;
    return pi;
}

std::pair<Matrix, std::vector<std::string>> read_estimate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "node") throw IoError(path + ": header must start with 'node'");
    const bool has_flag = header.size() > 1 && header[1] == "flag";
    const int k = static_cast<int>(header.size()) - 1 - (has_flag ? 1 : 0);
    if (k < 1) throw IoError(path + ": no membership columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> flags;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != k + 1 + (has_flag ? 1 : 0)) {
            std::ostringstream os;
            os << path << ":" << lineno << ": wrong column count";
            throw IoError(os.str());
        }
        const long node = std::stol(cells[0]);
        if (node != static_cast<long>(rows.size())) {
            std::ostringstream os;
            os << path << ":" << lineno << ": nodes must be consecutive from 0";
            throw IoError(os.str());
        }
        flags.push_back(has_flag ? cells[1] : "");
        std::vector<double> row(k);
        for (int c = 0; c < k; ++c) row[c] = std::stod(cells[c + 1 + (has_flag ? 1 : 0)]);
        rows.push_back(std::move(row));
    }
    Matrix pi(static_cast<int>(rows.size()), k);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < k; ++c) pi(static_cast<int>(i), c) = rows[i][c];
    return {pi, flags};
}

std::string node_flag_name(NodeFlag flag) {
    switch (flag) {
        case NodeFlag::Estimated: return "estimated";
        case NodeFlag::TrimmedUniform: return "trimmed_uniform";
        case NodeFlag::DegenerateXi1: return "degenerate_xi1";
    }
    return "?";
}

void write_estimate_csv(const std::string& path, const MembershipEstimate& est) {
    std::ostringstream os;
    os << "node,flag";
    for (int c = 0; c < est.pi_hat.cols(); ++c) os << ",pi_" << c + 1;
    os << "\n";
    for (int i = 0; i < est.pi_hat.rows(); ++i) {
        os << i << "," << node_flag_name(est.flags[i]);
        for (int c = 0; c < est.pi_hat.cols(); ++c) os << "," << format_double(est.pi_hat(i, c));
        os << "\n";
    }
    write_text_file(path, os.str());
}

void write_theta_csv(const std::string& path, const DegreeParams& theta) {
    std::ostringstream os;
    os << "node,theta\n";
    for (int i = 0; i < theta.n(); ++i) os << i << "," << format_double(theta.theta(i)) << "\n";
    write_text_file(path, os.str());
}

DegreeParams read_theta_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::vector<double> vals;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 'node,theta'";
            throw IoError(os.str());
        }
        vals.push_back(std::stod(cells[1]));
    }
    Vector theta(static_cast<int>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) theta(static_cast<int>(i)) = vals[i];
    return DegreeParams::from(std::move(theta));
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

std::map<std::string, ConfigSection> parse_config_text(const std::string& text) {
    std::map<std::string, ConfigSection> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                std::ostringstream os;
                os << "config line " << lineno << ": unterminated section header";
                throw ConfigError(os.str());
            }
            current = trim(line.substr(1, line.size() - 2));
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << lineno << ": expected 'key = value'";
            throw ConfigError(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream os;
            os << "config line " << lineno << ": empty key";
            throw ConfigError(os.str());
        }
        auto& section = sections[current];
        if (section.count(key)) {
            std::ostringstream os;
            os << "config line " << lineno << ": duplicate key '" << key << "'";
            throw ConfigError(os.str());
        }
        section[key] = value;
    }
    return sections;
}

std::map<std::string, ConfigSection> parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

}  // namespace msl
