#include "jjgz/pipeline/output.hpp"

#include "jjgz/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

namespace jjgz {

namespace {

using json = nlohmann::json;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Statuses are free text; keep the CSV single-field.
std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

} // namespace

void write_rows_csv(std::ostream& out, std::span<const SweepRow> rows)
{
    out << sweep_csv_header << '\n';
    for (const SweepRow& r : rows) {
        out << r.axis << ',' << num(r.value) << ',' << num(r.delta_ix_over_ic) << ','
            << (r.delta_ix_amperes ? num(*r.delta_ix_amperes) : "") << ',' << num(r.err) << ','
            << (r.plateau_ok ? (*r.plateau_ok ? "true" : "false") : "") << ',' << num(r.C) << ',' << num(r.Q1) << ','
            << num(r.K1) << ',' << csv_field(r.status) << '\n';
    }
}

void write_rows_json(std::ostream& out, std::span<const SweepRow> rows)
{
    json arr = json::array();
    for (const SweepRow& r : rows) {
        json j;
        j["axis"] = r.axis;
        j["value"] = r.value;
        j["delta_ix_over_ic"] = r.delta_ix_over_ic;
        j["delta_ix_amperes"] = r.delta_ix_amperes ? json(*r.delta_ix_amperes) : json(nullptr);
        j["err"] = r.err;
        j["plateau_ok"] = r.plateau_ok ? json(*r.plateau_ok) : json(nullptr);
        j["C"] = r.C;
        j["Q1"] = r.Q1;
        j["K1"] = r.K1;
        j["status"] = r.status;
        j["warnings"] = r.warnings;
        arr.push_back(std::move(j));
    }
    out << json{{"rows", std::move(arr)}}.dump(2) << '\n';
}

std::vector<SweepRow> read_rows_json(std::istream& in)
{
    std::vector<SweepRow> rows;
    try {
        const json root = json::parse(in);
        for (const json& j : root.at("rows")) {
            SweepRow r;
            r.axis = j.at("axis").get<std::string>();
            r.value = j.at("value").get<double>();
            r.delta_ix_over_ic = j.at("delta_ix_over_ic").get<double>();
            if (!j.at("delta_ix_amperes").is_null())
                r.delta_ix_amperes = j.at("delta_ix_amperes").get<double>();
            r.err = j.at("err").get<double>();
            if (!j.at("plateau_ok").is_null())
                r.plateau_ok = j.at("plateau_ok").get<bool>();
            r.C = j.at("C").get<double>();
            r.Q1 = j.at("Q1").get<double>();
            r.K1 = j.at("K1").get<double>();
            r.status = j.at("status").get<std::string>();
            r.warnings = j.value("warnings", std::vector<std::string>{});
            rows.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ingestion, "cli", std::string("malformed result file: ") + e.what());
    }
    return rows;
}

void write_probability_csv(std::ostream& out, std::span<const std::pair<double, double>> curve)
{
    out << "ix_over_ic,p\n";
    for (const auto& [x, p] : curve)
        out << num(x) << ',' << num(p) << '\n';
}

void write_probability_json(std::ostream& out, std::span<const std::pair<double, double>> curve, double width)
{
    json pts = json::array();
    for (const auto& [x, p] : curve)
        pts.push_back({{"ix_over_ic", x}, {"p", p}});
    out << json{{"delta_ix_over_ic", width}, {"curve", std::move(pts)}}.dump(2) << '\n';
}

} // namespace jjgz
