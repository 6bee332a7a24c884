#include "banditlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace banditlab {

using ojson = nlohmann::ordered_json;

namespace {

ojson parse_json(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

template <typename T>
T get_field(const ojson& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const ojson::exception& e) {
        throw ValidationError(std::string("bad field '") + key + "': " + e.what());
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

BanditInstance parse_instance(const std::string& json_text) {
    const ojson doc = parse_json(json_text);
    BanditInstance inst;
    if (doc.contains("support")) {
        const ojson& s = doc.at("support");
        inst.support = Support(get_field<double>(s, "a"), get_field<double>(s, "b"));
    }
    if (!doc.contains("arms") || !doc.at("arms").is_array()) throw ValidationError("missing field 'arms'");
    for (const ojson& a : doc.at("arms")) {
        ArmSpec arm;
        arm.mean = get_field<double>(a, "mean");
        arm.lower = a.contains("lower") ? get_field<double>(a, "lower") : inst.support.a;
        arm.upper = a.contains("upper") ? get_field<double>(a, "upper") : inst.support.b;
        if (a.contains("dist")) {
            const ojson& d = a.at("dist");
            arm.kind = dist_kind_from_string(get_field<std::string>(d, "kind"));
            if (d.contains("scale")) arm.scale = get_field<double>(d, "scale");
        }
        inst.arms.push_back(arm);
    }
    return inst;
}

std::string dump_instance(const BanditInstance& instance) {
    ojson doc;
    doc["support"] = {{"a", instance.support.a}, {"b", instance.support.b}};
    doc["arms"] = ojson::array();
    for (const ArmSpec& arm : instance.arms) {
        ojson dist = {{"kind", to_string(arm.kind)}};
        if (arm.kind == DistKind::ClippedGaussian) dist["scale"] = arm.scale;
        doc["arms"].push_back({{"mean", arm.mean}, {"dist", dist}, {"lower", arm.lower}, {"upper", arm.upper}});
    }
    return doc.dump(2) + "\n";
}

BanditInstance load_instance(const std::string& path) { return parse_instance(read_text(path)); }

LatentInstance parse_latent(const std::string& json_text) {
    const ojson doc = parse_json(json_text);
    LatentInstance latent;
    latent.visible = get_field<std::vector<std::string>>(doc, "contexts_visible");
    latent.hidden = get_field<std::vector<std::string>>(doc, "contexts_hidden");
    latent.p_u_given_z = get_field<std::vector<std::vector<double>>>(doc, "p_u_given_z");
    latent.means = get_field<std::vector<std::vector<std::vector<double>>>>(doc, "means");
    if (doc.contains("z_weights")) latent.z_weights = get_field<std::vector<double>>(doc, "z_weights");
    latent.num_arms = latent.means.size();
    return latent;
}

std::string dump_latent(const LatentInstance& latent) {
    ojson doc;
    doc["contexts_visible"] = latent.visible;
    doc["contexts_hidden"] = latent.hidden;
    doc["p_u_given_z"] = latent.p_u_given_z;
    doc["means"] = latent.means;
    if (!latent.z_weights.empty()) doc["z_weights"] = latent.z_weights;
    return doc.dump(2) + "\n";
}

LatentInstance load_latent(const std::string& path) { return parse_latent(read_text(path)); }

std::vector<LogRecord> parse_log_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("log CSV is empty");
    const auto header = split_csv_line(trim(line));
    int iz = -1, ik = -1, iy = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = trim(header[i]);
        if (h == "z") iz = static_cast<int>(i);
        if (h == "k") ik = static_cast<int>(i);
        if (h == "y") iy = static_cast<int>(i);
    }
    if (iz < 0 || ik < 0 || iy < 0) throw ValidationError("log CSV needs columns z,k,y");
    std::vector<LogRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const auto need = static_cast<std::size_t>(std::max({iz, ik, iy}));
        if (cells.size() <= need) throw ValidationError("log CSV line " + std::to_string(lineno) + " is short");
        try {
            LogRecord r;
            r.z = std::stoul(cells[iz]);
            r.k = std::stoul(cells[ik]);
            r.y = std::stod(cells[iy]);
            out.push_back(r);
        } catch (const std::exception&) {
            throw ValidationError("log CSV line " + std::to_string(lineno) + " is not numeric");
        }
    }
    return out;
}

std::string dump_log_csv(const std::vector<LogRecord>& records) {
    std::string out = "z,k,y\n";
    for (const LogRecord& r : records) {
        out += std::to_string(r.z) + "," + std::to_string(r.k) + "," + format_double(r.y) + "\n";
    }
    return out;
}

std::string dump_transferred(const TransferredBounds& bounds, const std::vector<std::string>& context_names) {
    if (context_names.size() != bounds.num_contexts()) throw ValidationError("context name count mismatch");
    ojson doc = ojson::object();
    for (std::size_t z = 0; z < bounds.num_contexts(); ++z) {
        ojson arms = ojson::array();
        for (const ArmInterval& iv : bounds.intervals[z]) {
            arms.push_back({{"lower", iv.lower}, {"upper", iv.upper}, {"failure_prob", iv.failure_prob}});
        }
        doc[context_names[z]] = arms;
    }
    return doc.dump(2) + "\n";
}

TransferredBounds parse_transferred(const std::string& json_text, const std::vector<std::string>& context_names) {
    const ojson doc = parse_json(json_text);
    TransferredBounds out;
    for (const std::string& name : context_names) {
        if (!doc.contains(name)) throw ValidationError("bounds file has no entry for visible context " + name);
        std::vector<ArmInterval> row;
        for (const ojson& a : doc.at(name)) {
            ArmInterval iv;
            iv.lower = iv.raw_lower = get_field<double>(a, "lower");
            iv.upper = iv.raw_upper = get_field<double>(a, "upper");
            if (a.contains("failure_prob")) iv.failure_prob = get_field<double>(a, "failure_prob");
            row.push_back(iv);
        }
        if (!out.intervals.empty() && row.size() != out.intervals.front().size()) {
            throw ValidationError("bounds file has differing arm counts across contexts");
        }
        out.intervals.push_back(std::move(row));
    }
    return out;
}

std::string trace_csv(const std::vector<RegretTrace>& traces, bool with_context) {
    std::string out = with_context ? "z,policy,seed,checkpoint,cum_regret\n" : "policy,seed,checkpoint,cum_regret\n";
    for (const RegretTrace& tr : traces) {
        const std::string prefix = (with_context ? std::to_string(tr.context) + "," : std::string()) + tr.policy + "," +
                                   std::to_string(tr.seed) + ",";
        for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
            out += prefix + std::to_string(tr.checkpoints[i]) + "," + format_double(tr.cum_regret[i]) + "\n";
        }
    }
    return out;
}

std::string aggregate_csv(const std::vector<PolicyAggregate>& aggregates, const std::vector<std::size_t>& contexts) {
    const bool with_context = !contexts.empty();
    if (with_context && contexts.size() != aggregates.size()) throw ValidationError("context list mismatch");
    std::string out = with_context ? "z,policy,checkpoint,mean,stderr,q_lo,q_hi\n"
                                   : "policy,checkpoint,mean,stderr,q_lo,q_hi\n";
    for (std::size_t a = 0; a < aggregates.size(); ++a) {
        const PolicyAggregate& agg = aggregates[a];
        const std::string prefix = (with_context ? std::to_string(contexts[a]) + "," : std::string()) + agg.policy + ",";
        for (std::size_t i = 0; i < agg.checkpoints.size(); ++i) {
            out += prefix + std::to_string(agg.checkpoints[i]) + "," + format_double(agg.mean[i]) + "," +
                   format_double(agg.stderr_[i]) + "," + format_double(agg.q_lo[i]) + "," +
                   format_double(agg.q_hi[i]) + "\n";
        }
    }
    return out;
}

std::string heatmap_csv(const std::vector<HeatmapCell>& cells) {
    std::string out = "mu1,mu2,ratio\n";
    for (const HeatmapCell& c : cells) {
        out += format_double(c.mu1) + "," + format_double(c.mu2) + "," + (c.ratio ? format_double(*c.ratio) : "") + "\n";
    }
    return out;
}

std::string bound_report_json(const std::vector<BoundReport>& reports) {
    ojson doc = ojson::object();
    for (const BoundReport& r : reports) {
        ojson entry = {{"asymptotic", r.asymptotic}};
        if (!r.horizons.empty()) {
            ojson ft = ojson::array();
            for (std::size_t i = 0; i < r.horizons.size(); ++i) {
                ft.push_back({{"n", r.horizons[i]}, {"bound", r.finite_time[i]}});
            }
            entry["finite_time"] = ft;
        }
        doc[r.algorithm] = entry;
    }
    return doc.dump(2) + "\n";
}

}  // namespace banditlab
