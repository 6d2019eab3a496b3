#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "epa/error.hpp"

namespace epa {

/// One (repetition, detector) outcome. Metrics that do not apply to the
/// attack's scale stay empty.
struct ResultRow {
    std::string dataset;
    std::string method;
    std::string scale;
    std::string detector;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    std::optional<double> nmi; // against the before-attack detection
    std::optional<double> ari;
    std::optional<double> h;     // community scale
    std::optional<bool> delta;   // node scale
    std::optional<double> degree_increment_pct;
    std::optional<double> walltime_s;
    std::optional<double> nmi_gt; // against ground truth, when known
    std::optional<double> ari_gt;
    std::optional<std::string> error;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv")
        return ReportFormat::Csv;
    if (s == "json")
        return ReportFormat::Json;
    throw ConfigError("unknown output format '" + s + "'");
}

inline const char* csv_header = "dataset,method,scale,detector,seed,budget,nmi,ari,h,delta,degree_increment_pct,walltime_s";

namespace detail {

inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_field(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> json_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<T>();
}

} // namespace detail

inline bool rows_have_ground_truth(const std::vector<ResultRow>& rows) {
    for (const auto& r : rows)
        if (r.nmi_gt || r.ari_gt)
            return true;
    return false;
}

/// CSV with the fixed header; `nmi_gt,ari_gt` are appended when any row
/// carries ground-truth scores. Error rows keep their identifying fields and
/// leave every metric empty.
inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    const bool gt = rows_have_ground_truth(rows);
    out << csv_header << (gt ? ",nmi_gt,ari_gt" : "") << '\n';
    for (const auto& r : rows) {
        out << detail::csv_escape(r.dataset) << ',' << r.method << ',' << r.scale << ',' << r.detector << ',' << r.seed
            << ',' << r.budget << ',' << detail::csv_field(r.nmi) << ',' << detail::csv_field(r.ari) << ','
            << detail::csv_field(r.h) << ',' << (r.delta ? (*r.delta ? "1" : "0") : "") << ','
            << detail::csv_field(r.degree_increment_pct) << ',' << detail::csv_field(r.walltime_s);
        if (gt)
            out << ',' << detail::csv_field(r.nmi_gt) << ',' << detail::csv_field(r.ari_gt);
        out << '\n';
    }
}

inline nlohmann::json row_to_json(const ResultRow& r) {
    nlohmann::json j = {{"dataset", r.dataset},
                        {"method", r.method},
                        {"scale", r.scale},
                        {"detector", r.detector},
                        {"seed", r.seed},
                        {"budget", r.budget},
                        {"nmi", detail::optional_json(r.nmi)},
                        {"ari", detail::optional_json(r.ari)},
                        {"h", detail::optional_json(r.h)},
                        {"delta", detail::optional_json(r.delta)},
                        {"degree_increment_pct", detail::optional_json(r.degree_increment_pct)},
                        {"walltime_s", detail::optional_json(r.walltime_s)}};
    if (r.nmi_gt || r.ari_gt) {
        j["nmi_gt"] = detail::optional_json(r.nmi_gt);
        j["ari_gt"] = detail::optional_json(r.ari_gt);
    }
    if (r.error)
        j["error"] = *r.error;
    return j;
}

inline ResultRow row_from_json(const nlohmann::json& j) {
    ResultRow r;
    r.dataset = j.at("dataset").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.scale = j.at("scale").get<std::string>();
    r.detector = j.at("detector").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.budget = j.at("budget").get<std::size_t>();
    r.nmi = detail::json_optional<double>(j, "nmi");
    r.ari = detail::json_optional<double>(j, "ari");
    r.h = detail::json_optional<double>(j, "h");
    r.delta = detail::json_optional<bool>(j, "delta");
    r.degree_increment_pct = detail::json_optional<double>(j, "degree_increment_pct");
    r.walltime_s = detail::json_optional<double>(j, "walltime_s");
    r.nmi_gt = detail::json_optional<double>(j, "nmi_gt");
    r.ari_gt = detail::json_optional<double>(j, "ari_gt");
    r.error = detail::json_optional<std::string>(j, "error");
    return r;
}

inline void write_json(std::ostream& out, const std::vector<ResultRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back(row_to_json(r));
    out << arr.dump(2) << '\n';
}

inline std::vector<ResultRow> read_json_rows(std::istream& in) {
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed result file: ") + e.what());
    }
    std::vector<ResultRow> rows;
    for (const auto& j : arr)
        rows.push_back(row_from_json(j));
    return rows;
}

/// Mean and sample standard deviation of one metric for one (method, detector).
struct SummaryEntry {
    std::string method;
    std::string detector;
    std::string metric;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
};

inline std::vector<SummaryEntry> summarize(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, std::string, int>;
    static const char* names[] = {"budget", "nmi", "ari", "h", "delta", "degree_increment_pct", "nmi_gt", "ari_gt"};
    std::map<Key, std::vector<double>> values;
    for (const auto& r : rows) {
        if (r.error)
            continue;
        const std::optional<double> metrics[] = {static_cast<double>(r.budget),
                                                 r.nmi,
                                                 r.ari,
                                                 r.h,
                                                 r.delta ? std::optional<double>(*r.delta ? 1.0 : 0.0) : std::nullopt,
                                                 r.degree_increment_pct,
                                                 r.nmi_gt,
                                                 r.ari_gt};
        for (int k = 0; k < 8; ++k)
            if (metrics[k])
                values[{r.method, r.detector, k}].push_back(*metrics[k]);
    }
    std::vector<SummaryEntry> out;
    for (const auto& [key, xs] : values) {
        SummaryEntry e{std::get<0>(key), std::get<1>(key), names[std::get<2>(key)], xs.size()};
        for (double x : xs)
            e.mean += x;
        e.mean /= static_cast<double>(xs.size());
        if (xs.size() > 1) {
            for (double x : xs)
                e.std += (x - e.mean) * (x - e.mean);
            e.std = std::sqrt(e.std / static_cast<double>(xs.size() - 1));
        }
        out.push_back(e);
    }
    return out;
}

inline void write_summary(std::ostream& out, const std::vector<SummaryEntry>& summary, ReportFormat fmt) {
    if (fmt == ReportFormat::Csv) {
        out << "method,detector,metric,count,mean,std\n";
        for (const auto& e : summary)
            out << e.method << ',' << e.detector << ',' << e.metric << ',' << e.count << ','
                << detail::format_number(e.mean) << ',' << detail::format_number(e.std) << '\n';
        return;
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : summary)
        arr.push_back({{"method", e.method},
                       {"detector", e.detector},
                       {"metric", e.metric},
                       {"count", e.count},
                       {"mean", e.mean},
                       {"std", e.std}});
    out << arr.dump(2) << '\n';
}

inline void write_rows(std::ostream& out, const std::vector<ResultRow>& rows, ReportFormat fmt) {
    if (fmt == ReportFormat::Csv)
        write_csv(out, rows);
    else
        write_json(out, rows);
}

/// Path of the summary written next to a report: `runs.csv` -> `runs.summary.csv`.
inline std::string summary_path(const std::string& path, ReportFormat fmt) {
    const std::string ext = fmt == ReportFormat::Csv ? "csv" : "json";
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    const std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash) ? path.substr(0, dot) : path;
    return stem + ".summary." + ext;
}

/// Writes the rows to `path` and the per-(method, detector) summary beside it.
inline void emit_report(const std::vector<ResultRow>& rows, ReportFormat fmt, const std::string& path) {
    if (rows.empty())
        throw Error("no result rows to write");
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    write_rows(out, rows, fmt);
    const std::string spath = summary_path(path, fmt);
    std::ofstream sout(spath);
    if (!sout)
        throw Error("cannot write " + spath);
    write_summary(sout, summarize(rows), fmt);
    if (!out || !sout)
        throw Error("I/O error while writing " + path);
}

} // namespace epa
