#include "p2a/util.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace p2a {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string fmt_double(double v) {
    // Try increasing precision until the value round-trips exactly.
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    const std::string t = trim(s);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    bool overflow = errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL);
    if (end == t.c_str() || *end != '\0' || overflow)
        throw ValidationError(context, "not a number: '" + t + "'");
    return v;
}

const std::string& KvFile::get(const std::string& key) const {
    auto it = index.find(key);
    if (it == index.end()) throw ValidationError(key, "missing key");
    return it->second;
}

double KvFile::get_double(const std::string& key) const { return parse_double(get(key), key); }

KvFile KvFile::parse_text(const std::string& text, const std::string& name) {
    KvFile kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(name, lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!val.empty() && val.front() == '"' && val.back() == '"' && val.size() >= 2)
            val = val.substr(1, val.size() - 2);
        if (key.empty()) throw ParseError(name, lineno, "empty key");
        if (kv.index.count(key)) throw ParseError(name, lineno, "duplicate key '" + key + "'");
        kv.entries.emplace_back(key, val);
        kv.index.emplace(key, val);
    }
    return kv;
}

KvFile KvFile::parse_file(const std::string& path) { return parse_text(read_file(path), path); }

int Csv::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

Csv Csv::parse_file(const std::string& path) {
    return parse_text(read_file(path), path);
}

Csv Csv::parse_text(const std::string& text, const std::string& path) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        for (auto& c : cells) c = trim(c);
        if (csv.header.empty()) {
            csv.header = cells;
        } else {
            if (cells.size() != csv.header.size())
                throw ParseError(path, lineno, "expected " + std::to_string(csv.header.size()) + " cells");
            csv.rows.push_back(std::move(cells));
        }
    }
    if (csv.header.empty()) throw ParseError(path, 0, "empty CSV");
    return csv;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace p2a
