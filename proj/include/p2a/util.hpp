#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2a {

// Error taxonomy shared by all modules. The C API maps these onto status codes.
struct Error : std::runtime_error {
    enum class Kind { validation, parse, io, solve, internal };
    Kind kind;
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct ValidationError : Error {
    std::string field;
    ValidationError(std::string fld, const std::string& msg)
        : Error(Kind::validation, fld.empty() ? msg : fld + ": " + msg), field(std::move(fld)) {}
};

struct ParseError : Error {
    std::string file;
    int line;
    ParseError(std::string f, int ln, const std::string& msg)
        : Error(Kind::parse, f + ":" + std::to_string(ln) + ": " + msg), file(std::move(f)), line(ln) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(Kind::io, msg) {}
};

struct SolveError : Error {
    enum class What { process, unparseable, timeout, limit, internal };
    What what;
    SolveError(What w, const std::string& msg) : Error(Kind::solve, msg), what(w) {}
};

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

// Shortest round-trippable decimal form of a double.
std::string fmt_double(double v);
double parse_double(const std::string& s, const std::string& context);

// Flat key/value file: `key = value` lines, '#' comments, no sections.
// Order preserved for deterministic serialization of unknown-key errors.
struct KvFile {
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, std::string> index;

    bool has(const std::string& key) const { return index.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    static KvFile parse_file(const std::string& path);
    static KvFile parse_text(const std::string& text, const std::string& name);
};

// Minimal CSV (numeric payloads, no quoting).
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int column(const std::string& name) const;  // -1 when absent
    static Csv parse_file(const std::string& path);
    static Csv parse_text(const std::string& text, const std::string& path);
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit, used for input digests in run manifests.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace p2a
