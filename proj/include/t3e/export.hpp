#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "t3e/ledger.hpp"
#include "t3e/oneform.hpp"
#include "t3e/verify.hpp"

// Serialization of ledger tables, verification records, certificates and
// field snapshots.  All artifacts are deterministic for a fixed config; the
// ledger hash covers the evaluated table so any change in any enclosure is
// visible downstream.

namespace t3e {

using ordered_json = nlohmann::ordered_json;

struct LedgerRow {
    std::string name;
    std::optional<double> delta;
    std::optional<double> lo, hi;
    std::string error;  // nonempty when not evaluable at this delta
    std::string citation;
    std::string reference_note;
    bool discrepancy = false;
};

inline std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string format_hex(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

/// One row per non-parametric node, plus one row per (parametric node,
/// delta probe).  Probes that are out of domain produce an error row; the
/// outcome is deterministic either way.
inline std::vector<LedgerRow> ledger_rows(const Ledger& ledger,
                                          const std::vector<double>& delta_probes = {0.0, 1e-15,
                                                                                     1e-3, 1e-2}) {
    std::vector<LedgerRow> rows;
    for (const auto& node : ledger.nodes()) {
        if (!node.delta_parametric) {
            LedgerRow r{node.name, {}, {}, {}, "", node.citation, node.reference_note,
                        node.discrepancy};
            Interval v = ledger.eval(node.name);
            r.lo = v.lo();
            r.hi = v.hi();
            rows.push_back(std::move(r));
            continue;
        }
        for (double d : delta_probes) {
            LedgerRow r{node.name, d,  {}, {}, "", node.citation, node.reference_note,
                        node.discrepancy};
            try {
                Interval v = ledger.eval(node.name, d);
                r.lo = v.lo();
                r.hi = v.hi();
            } catch (const std::runtime_error& e) {
                r.error = e.what();
            }
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

/// FNV-1a over the canonical hex serialization of the table.
inline std::uint64_t ledger_hash(const std::vector<LedgerRow>& rows) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& r : rows) {
        feed(r.name);
        feed(r.delta ? format_hex(*r.delta) : "-");
        feed(r.lo ? format_hex(*r.lo) : r.error);
        feed(r.hi ? format_hex(*r.hi) : r.error);
    }
    return h;
}

inline std::string ledger_hash_string(const std::vector<LedgerRow>& rows) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, ledger_hash(rows));
    return buf;
}

inline ordered_json ledger_rows_json(const std::vector<LedgerRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["name"] = r.name;
        if (r.delta)
            j["delta"] = *r.delta;
        else
            j["delta"] = nullptr;
        if (r.lo) {
            j["lo"] = *r.lo;
            j["hi"] = *r.hi;
            j["width"] = *r.hi - *r.lo;
        } else {
            j["error"] = r.error;
        }
        j["citation"] = r.citation;
        j["reference_value"] = r.reference_note;
        j["discrepancy"] = r.discrepancy;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

inline std::string ledger_rows_csv(const std::vector<LedgerRow>& rows) {
    std::string out = "name,lo,hi,delta,citation,reference_value,discrepancy\n";
    for (const auto& r : rows) {
        out += r.name + ",";
        out += (r.lo ? format_full(*r.lo) : "") + std::string(",");
        out += (r.hi ? format_full(*r.hi) : "") + std::string(",");
        out += (r.delta ? format_full(*r.delta) : "") + std::string(",");
        out += csv_escape(r.citation) + ",";
        out += csv_escape(r.error.empty() ? r.reference_note : ("not evaluable: " + r.error)) + ",";
        out += (r.discrepancy ? "true" : "false");
        out += "\n";
    }
    return out;
}

inline std::string ledger_rows_markdown(const std::vector<LedgerRow>& rows) {
    std::string out = "| constant | delta | enclosure | width | flag | source |\n";
    out += "|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        out += "| `" + r.name + "` | ";
        out += (r.delta ? format_full(*r.delta) : "-") + std::string(" | ");
        if (r.lo)
            out += "[" + format_full(*r.lo) + ", " + format_full(*r.hi) + "] | " +
                   format_full(*r.hi - *r.lo) + " | ";
        else
            out += "not evaluable | - | ";
        out += (r.discrepancy ? "reference disagrees" : "") + std::string(" | ");
        std::string cite = r.citation;
        if (!r.reference_note.empty()) cite += " [reference: " + r.reference_note + "]";
        out += cite + " |\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// verification records

inline ordered_json record_json(const VerificationRecord& r) {
    ordered_json j;
    j["inequality_id"] = r.inequality_id;
    j["test_case_id"] = r.test_case_id;
    j["lhs"] = r.lhs;
    j["rhs_bound"] = r.rhs_bound;
    j["ratio"] = r.ratio;
    j["pass"] = r.pass;
    j["gating"] = r.gating;
    j["grid_n"] = r.grid_n;
    j["seed"] = r.seed;
    j["delta_measured"] = r.delta_measured;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline std::string records_jsonl(const std::vector<VerificationRecord>& recs) {
    std::string out;
    for (const auto& r : recs) out += record_json(r).dump() + "\n";
    return out;
}

inline std::string records_csv_summary(const std::vector<VerificationRecord>& recs) {
    // aggregate per inequality_id, preserving first-seen order
    std::vector<std::string> order;
    struct Agg {
        int total = 0, passed = 0, gating_failed = 0;
        double min_ratio = std::numeric_limits<double>::infinity();
        double max_ratio = 0.0;
    };
    std::map<std::string, Agg> agg;
    for (const auto& r : recs) {
        if (!agg.count(r.inequality_id)) order.push_back(r.inequality_id);
        Agg& a = agg[r.inequality_id];
        ++a.total;
        if (r.pass) ++a.passed;
        if (r.gating && !r.pass) ++a.gating_failed;
        a.min_ratio = std::min(a.min_ratio, r.ratio);
        a.max_ratio = std::max(a.max_ratio, r.ratio);
    }
    std::string out = "inequality_id,total,passed,gating_failures,min_ratio,max_ratio\n";
    for (const auto& id : order) {
        const Agg& a = agg.at(id);
        out += id + "," + std::to_string(a.total) + "," + std::to_string(a.passed) + "," +
               std::to_string(a.gating_failed) + "," + format_full(a.min_ratio) + "," +
               format_full(a.max_ratio) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// certificates and delta-star results

inline ordered_json certificate_json(const OneFormCertificate& c) {
    ordered_json j;
    j["axis"] = c.axis + 1;  // 1-based in artifacts
    j["delta_nominal"] = c.delta_nominal;
    j["delta_measured"] = c.delta_measured;
    j["min_pointwise_norm"] = c.min_pointwise_norm;
    if (c.epsilon_defined) {
        j["epsilon_bound"] = {{"lo", c.epsilon_bound.lo()}, {"hi", c.epsilon_bound.hi()}};
    } else {
        j["epsilon_bound"] = nullptr;
    }
    if (c.epsilon_first_order_defined) {
        j["epsilon_bound_first_order_christoffel"] = {{"lo", c.epsilon_first_order.lo()},
                                                      {"hi", c.epsilon_first_order.hi()}};
    } else {
        j["epsilon_bound_first_order_christoffel"] = nullptr;
    }
    j["residual_codifferential"] = c.residual_codifferential;
    j["residual_codifferential_relative"] = c.residual_codifferential_relative;
    j["residual_exterior"] = c.residual_exterior;
    j["rhs_norm"] = c.rhs_norm;
    j["periods"] = {c.periods[0], c.periods[1], c.periods[2]};
    j["solver_iterations"] = c.solver_iterations;
    j["degenerate_rhs"] = c.degenerate_rhs;
    j["sign_choice"] = c.sign_choice;
    j["beyond_theorem"] = c.beyond_theorem;
    j["pass"] = c.pass;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline ordered_json delta_star_json(const DeltaStarResult& r) {
    ordered_json j;
    j["criterion"] = r.criterion == DeltaCriterion::absorption ? "absorption" : "one-form";
    j["delta_star"] = r.delta_star;
    j["bracket"] = {{"holds_at", r.delta_holds}, {"fails_at", r.delta_fails}};
    j["holds_certificate"] = {{"quantity", r.holds_quantity},
                              {"lo", r.holds_value.lo()},
                              {"hi", r.holds_value.hi()}};
    j["fails_certificate"] = {{"quantity", r.fails_quantity},
                              {"lo", r.fails_value.lo()},
                              {"hi", r.fails_value.hi()}};
    j["bisection_steps"] = r.bisection_steps;
    return j;
}

// ---------------------------------------------------------------------------
// binary field snapshots: raw little-endian float64, row-major, axis order
// x1 x2 x3, plus a JSON sidecar header

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for reading: " + path);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline void save_scalar_field(const std::string& path_base, const ScalarField& u,
                              const std::string& kind, std::uint64_t seed) {
    ordered_json header;
    header["n"] = u.grid.n;
    header["field_kind"] = kind;
    header["seed"] = seed;
    header["components"] = 1;
    header["format"] = "float64-le";
    header["order"] = "row-major-x1x2x3";
    write_file(path_base + ".json", header.dump(2) + "\n");
    std::ofstream f(path_base + ".bin", std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path_base + ".bin");
    f.write(reinterpret_cast<const char*>(u.v.data()),
            static_cast<std::streamsize>(u.v.size() * sizeof(double)));
}

inline ScalarField load_scalar_field(const std::string& path_base) {
    ordered_json header = ordered_json::parse(read_file(path_base + ".json"));
    GridSpec g(header.at("n").get<int>());
    ScalarField u(g);
    std::string raw = read_file(path_base + ".bin");
    if (raw.size() != u.v.size() * sizeof(double))
        throw ConfigError("field payload size mismatch: " + path_base + ".bin");
    std::memcpy(u.v.data(), raw.data(), raw.size());
    return u;
}

inline void save_one_form(const std::string& path_base, const OneFormField& w,
                          const std::string& kind, std::uint64_t seed) {
    ordered_json header;
    header["n"] = w.grid.n;
    header["field_kind"] = kind;
    header["seed"] = seed;
    header["components"] = 3;
    header["component_order"] = {"dx1", "dx2", "dx3"};
    header["format"] = "float64-le";
    header["order"] = "row-major-x1x2x3";
    write_file(path_base + ".json", header.dump(2) + "\n");
    std::ofstream f(path_base + ".bin", std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path_base + ".bin");
    for (int a = 0; a < 3; ++a)
        f.write(reinterpret_cast<const char*>(w.comp[a].v.data()),
                static_cast<std::streamsize>(w.comp[a].v.size() * sizeof(double)));
}

/// Metric snapshot: the six symmetric components in fixed order.
inline void save_metric_field(const std::string& path_base, const MetricField& g,
                              const std::string& kind, std::uint64_t seed) {
    ordered_json header;
    header["n"] = g.grid.n;
    header["field_kind"] = kind;
    header["seed"] = seed;
    header["components"] = 6;
    header["component_order"] = {"g11", "g12", "g13", "g22", "g23", "g33"};
    header["delta_nominal"] = g.delta_nominal;
    header["measured_c0"] = g.measured_c0;
    header["measured_c1"] = g.measured_c1;
    header["format"] = "float64-le";
    header["order"] = "row-major-x1x2x3";
    write_file(path_base + ".json", header.dump(2) + "\n");
    std::ofstream f(path_base + ".bin", std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path_base + ".bin");
    for (int c = 0; c < 6; ++c)
        f.write(reinterpret_cast<const char*>(g.comp[c].v.data()),
                static_cast<std::streamsize>(g.comp[c].v.size() * sizeof(double)));
}

inline MetricField load_metric_field(const std::string& path_base) {
    ordered_json header = ordered_json::parse(read_file(path_base + ".json"));
    GridSpec grid(header.at("n").get<int>());
    MetricField g(grid);
    g.delta_nominal = header.value("delta_nominal", 0.0);
    g.measured_c0 = header.value("measured_c0", -1.0);
    g.measured_c1 = header.value("measured_c1", -1.0);
    std::string raw = read_file(path_base + ".bin");
    const std::size_t comp_bytes = grid.size() * sizeof(double);
    if (raw.size() != 6 * comp_bytes)
        throw ConfigError("metric payload size mismatch: " + path_base + ".bin");
    for (int c = 0; c < 6; ++c)
        std::memcpy(g.comp[c].v.data(), raw.data() + c * comp_bytes, comp_bytes);
    return g;
}

}  // namespace t3e
