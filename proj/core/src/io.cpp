#include "shp/io.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>

#include "shp/errors.hpp"

namespace shp {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("invalid JSON in " + path + ": " + e.what());
    }
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {  // row-major nesting
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        rows.push_back(vector_to_json(m.row(r)));
    }
    return rows;
}

}  // namespace

std::string sidecar_path(const std::string& csv_path) {
    const auto dot = csv_path.find_last_of('.');
    const auto slash = csv_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return csv_path + ".json";
    }
    return csv_path.substr(0, dot) + ".json";
}

void write_events_csv(const std::vector<EventSequence>& seqs, const std::string& csv_path) {
    if (seqs.empty()) throw DataError("write_events_csv: no sequences");
    const int d = seqs.front().dim_count;
    const double horizon = seqs.front().horizon;
    bool any_tag = false;
    for (const auto& s : seqs) {
        if (s.dim_count != d || s.horizon != horizon) {
            throw DataError("write_events_csv: sequences disagree on D or T");
        }
        any_tag |= s.source.has_value();
    }

    std::ostringstream csv;
    csv << "seq_id,t,dim\n";
    csv << std::setprecision(17);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        for (const auto& e : seqs[i].events) {
            csv << (i + 1) << ',' << e.t << ',' << (e.dim + 1) << '\n';
        }
    }
    save_text_file(csv_path, csv.str());

    json sidecar{{"D", d}, {"T", horizon}, {"num_seqs", seqs.size()}};
    if (any_tag) {
        json tags = json::array();
        for (const auto& s : seqs) {
            if (s.source.has_value()) {
                tags.push_back(*s.source);
            } else {
                tags.push_back(nullptr);
            }
        }
        sidecar["source_ids"] = tags;
    }
    save_text_file(sidecar_path(csv_path), sidecar.dump(2) + "\n");
}

std::vector<EventSequence> read_events_csv(const std::string& csv_path) {
    const json sidecar = load_json_file(sidecar_path(csv_path));
    int d = 0;
    double horizon = 0.0;
    std::size_t num_seqs = 0;
    try {
        d = sidecar.at("D").get<int>();
        horizon = sidecar.at("T").get<double>();
        num_seqs = sidecar.at("num_seqs").get<std::size_t>();
    } catch (const json::exception& e) {
        throw DataError("sidecar " + sidecar_path(csv_path) + ": " + e.what());
    }
    if (d < 1 || !(horizon > 0.0)) {
        throw DataError("sidecar " + sidecar_path(csv_path) + ": bad D or T");
    }

    std::vector<std::optional<int>> sources(num_seqs, std::nullopt);
    if (sidecar.contains("source_ids")) {
        const json& tags = sidecar["source_ids"];
        if (tags.size() != num_seqs) {
            throw DataError("sidecar source_ids length differs from num_seqs");
        }
        for (std::size_t i = 0; i < num_seqs; ++i) {
            if (!tags[i].is_null()) sources[i] = tags[i].get<int>();
        }
    }

    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("seq_id,t,dim", 0) != 0) {
        throw DataError(csv_path + ": expected header seq_id,t,dim");
    }

    std::vector<std::vector<Event>> raw(num_seqs);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t id = 0;
        double t = 0.0;
        int dim = 0;
        char comma1 = 0, comma2 = 0;
        std::istringstream row(line);
        if (!(row >> id >> comma1 >> t >> comma2 >> dim) || comma1 != ',' ||
            comma2 != ',') {
            throw DataError(csv_path + ':' + std::to_string(line_no) + ": malformed row");
        }
        if (id < 1 || id > num_seqs) {
            throw DataError(csv_path + ':' + std::to_string(line_no) +
                            ": seq_id out of range");
        }
        raw[id - 1].push_back({t, dim - 1});
    }

    std::vector<EventSequence> seqs;
    seqs.reserve(num_seqs);
    for (std::size_t i = 0; i < num_seqs; ++i) {
        seqs.push_back(canonicalize(std::move(raw[i]), d, horizon, sources[i]));
    }
    return seqs;
}

void write_model_json(const HawkesModel& model, const std::string& path) {
    json doc{{"D", model.dim()},
             {"w", model.w},
             {"mu", vector_to_json(model.mu)},
             {"A", matrix_to_json(model.A)}};
    save_text_file(path, doc.dump(2) + "\n");
}

HawkesModel read_model_json(const std::string& path) {
    const json doc = load_json_file(path);
    HawkesModel model;
    try {
        const int d = doc.at("D").get<int>();
        model.w = doc.at("w").get<double>();
        const auto& mu = doc.at("mu");
        const auto& a = doc.at("A");
        if (static_cast<int>(mu.size()) != d || static_cast<int>(a.size()) != d) {
            throw DataError(path + ": mu/A sizes disagree with D");
        }
        model.mu.resize(d);
        for (int i = 0; i < d; ++i) model.mu(i) = mu[static_cast<std::size_t>(i)].get<double>();
        model.A.resize(d, d);
        for (int r = 0; r < d; ++r) {
            const auto& row = a[static_cast<std::size_t>(r)];
            if (static_cast<int>(row.size()) != d) {
                throw DataError(path + ": A is not square");
            }
            for (int c = 0; c < d; ++c) {
                model.A(r, c) = row[static_cast<std::size_t>(c)].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return model;
}

void write_fit_diagnostics_json(const FitResult& fit, const std::string& path) {
    json mus = json::array();
    for (const auto& model : fit.models) mus.push_back(vector_to_json(model.mu));
    json doc{{"strategy", strategy_name(fit.strategy)},
             {"loss", fit.loss},
             {"iterations", fit.iterations},
             {"stationary", fit.stationary},
             {"constrained", fit.constrained},
             {"ridge_fallback", fit.ridge_fallback},
             {"rank_deficient", fit.rank_deficient},
             {"underdetermined", fit.underdetermined},
             {"mu_per_source", mus},
             {"objective_trace", fit.objective_trace}};
    save_text_file(path, doc.dump(2) + "\n");
}

std::string bound_report_to_json(const BoundReport& report) {
    json doc{{"B_mu", report.B_mu},
             {"B_A", report.B_A},
             {"B_sigma_mu", report.B_sigma_mu},
             {"D", report.D},
             {"M", report.M},
             {"I", report.I},
             {"bound_single", report.bound_single},
             {"bound_multi", report.bound_multi},
             {"bound_super", report.bound_super},
             {"condition_holds", report.condition_holds},
             {"note", "bound values up to a universal constant"}};
    return doc.dump(2) + "\n";
}

std::vector<Eigen::VectorXd> read_mus_json(const std::string& path) {
    const json doc = load_json_file(path);
    if (!doc.is_array() || doc.empty()) {
        throw DataError(path + ": expected a nonempty array of mu vectors");
    }
    std::vector<Eigen::VectorXd> mus;
    mus.reserve(doc.size());
    for (const auto& entry : doc) {
        if (!entry.is_array() || entry.empty()) {
            throw DataError(path + ": each mu must be a nonempty array");
        }
        Eigen::VectorXd mu(entry.size());
        for (std::size_t i = 0; i < entry.size(); ++i) {
            mu(static_cast<Eigen::Index>(i)) = entry[i].get<double>();
        }
        mus.push_back(std::move(mu));
    }
    return mus;
}

}  // namespace shp
