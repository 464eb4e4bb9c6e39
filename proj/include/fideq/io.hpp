#pragma once

// JSON and CSV encodings for states, family parameters and condition reports.
//
//   state:      {"dimB": d, "amplitudes": [[re, im], ...]}   (row-major, 2d entries)
//   params:     {"lambda": x, "k": x, "p": x, "theta01": x, "theta10": x}
//   separable:  {"c11": [re, im], "tail": [[re, im], ...]}
//   report:     {"residuals": [..4], "flags": [..4], "k": x|null, "p": x|null, "verdict": b}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fideq/conditions.hpp"
#include "fideq/error.hpp"
#include "fideq/generator.hpp"
#include "fideq/states.hpp"

namespace fideq::io {

using Json = nlohmann::json;

/// %.17g: round-trip exact for doubles.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorKind::Parse, "complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json state_to_json(const BipartitePureState& s) {
    Json amps = Json::array();
    for (const auto& z : s.coeffs().entries()) amps.push_back(complex_to_json(z));
    return Json{{"dimB", s.dimB()}, {"amplitudes", std::move(amps)}};
}

inline BipartitePureState state_from_json(const Json& j, Normalize policy = Normalize::Reject) {
    if (!j.is_object() || !j.contains("dimB") || !j.contains("amplitudes"))
        throw Error(ErrorKind::Parse, "state needs \"dimB\" and \"amplitudes\"");
    if (!j["dimB"].is_number_integer() || j["dimB"].get<long long>() < 2)
        throw Error(ErrorKind::DimensionMismatch, "\"dimB\" must be an integer >= 2");
    if (!j["amplitudes"].is_array()) throw Error(ErrorKind::Parse, "\"amplitudes\" must be an array");
    std::vector<Complex> amps;
    for (const auto& a : j["amplitudes"]) amps.push_back(complex_from_json(a));
    return new_state(j["dimB"].get<std::size_t>(), amps, policy);
}

inline Json params_to_json(const EqualityFamilyParams& p) {
    return Json{{"lambda", p.lambda}, {"k", p.k}, {"p", p.p}, {"theta01", p.theta01}, {"theta10", p.theta10}};
}

inline EqualityFamilyParams params_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Parse, "parameters must be a JSON object");
    auto number = [&](const char* key, double fallback, bool required) {
        if (!j.contains(key)) {
            if (required) throw Error(ErrorKind::Parse, std::string("missing \"") + key + "\"");
            return fallback;
        }
        if (!j[key].is_number()) throw Error(ErrorKind::Parse, std::string("\"") + key + "\" must be a number");
        return j[key].get<double>();
    };
    EqualityFamilyParams p;
    p.lambda = number("lambda", 0.0, true);
    p.k = number("k", 0.0, true);
    p.p = number("p", 0.0, true);
    p.theta01 = number("theta01", 0.0, false);
    p.theta10 = number("theta10", 0.0, false);
    return p;
}

inline Json separable_params_to_json(const SeparableFamilyParams& p) {
    Json tail = Json::array();
    for (const auto& z : p.tail) tail.push_back(complex_to_json(z));
    return Json{{"c11", complex_to_json(p.c11)}, {"tail", std::move(tail)}};
}

inline SeparableFamilyParams separable_params_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("c11") || !j.contains("tail") || !j["tail"].is_array())
        throw Error(ErrorKind::Parse, "separable family needs \"c11\" and an array \"tail\"");
    SeparableFamilyParams p;
    p.c11 = complex_from_json(j["c11"]);
    for (const auto& z : j["tail"]) p.tail.push_back(complex_from_json(z));
    return p;
}

inline Json report_to_json(const ConditionReport& r) {
    auto optional = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return Json{{"residuals", r.residuals}, {"flags", r.flags}, {"k", optional(r.k)},
                {"p", optional(r.p)},       {"verdict", r.verdict}};
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
}

/// Writes to a sibling temporary file and renames it into place, so a failed
/// write never leaves a partial file at `path`.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Parse, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorKind::Parse, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Parse, "cannot move output into " + path.string());
    }
}

struct ScanRecord {
    std::uint64_t seed = 0;
    std::size_t dimB = 0;
    double lambda = 0.0;
    double fGlobal = 0.0;
    double fLocal = 0.0;
    double gap = 0.0;
    bool verdictNumeric = false;
    bool verdictConditions = false;
};

inline constexpr const char* kScanCsvHeader = "seed,dimB,lambda,fGlobal,fLocal,gap,verdictNumeric,verdictConditions";

inline std::string scan_csv_row(const ScanRecord& r) {
    std::ostringstream os;
    os << r.seed << ',' << r.dimB << ',' << format_double(r.lambda) << ',' << format_double(r.fGlobal) << ','
       << format_double(r.fLocal) << ',' << format_double(r.gap) << ',' << (r.verdictNumeric ? "true" : "false")
       << ',' << (r.verdictConditions ? "true" : "false");
    return os.str();
}

} // namespace fideq::io
