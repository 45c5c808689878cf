#include "pnsim/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pnsim {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, end);
}

std::string sha256_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 0xf];
    }
    return out;
}

namespace {

std::ofstream open_out(const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    return out;
}

std::string beta_field(const std::optional<double>& beta) { return beta ? format_double(*beta) : ""; }

}  // namespace

void write_path_csv(const fs::path& file, const Scenario& s, const PathRecord& path) {
    auto out = open_out(file);
    out << "t";
    for (const auto& edge : s.topology.edges()) {
        const auto& n = edge.name;
        out << ",regime_" << n << ",capacity_" << n << ",queue_" << n << ",ur_" << n << ",rwip_" << n
            << ",exit_flux_" << n << ",boundary_flux_" << n;
    }
    out << ",q_net,g_net_out,g_net_in,network_mass\n";
    for (std::size_t k = 0; k < path.samples(); ++k) {
        out << format_double(path.times[k]);
        for (EdgeId e = 0; e < path.num_edges; ++e) {
            const std::size_t i = path.at(k, e);
            out << ',' << path.regime[i] + 1 << ',' << format_double(path.capacity[i]) << ','
                << format_double(path.queue[i]) << ',' << format_double(path.utilization[i]) << ','
                << format_double(path.work_in_progress[i]) << ',' << format_double(path.exit_flux[i]) << ','
                << format_double(path.boundary_flux[i]);
        }
        out << ',' << format_double(path.q_net[k]) << ',' << format_double(path.g_out_net[k]) << ','
            << format_double(path.g_in_net[k]) << ',' << format_double(path.network_mass[k]) << '\n';
    }
}

void write_events_csv(const fs::path& file, const Scenario& s, const PathRecord& path) {
    auto out = open_out(file);
    out << "time,edge,from,to\n";
    for (const auto& ev : path.events)
        out << format_double(ev.time) << ',' << s.topology.edge(ev.edge).name << ',' << ev.from + 1 << ','
            << ev.to + 1 << '\n';
}

void write_edge_series_csv(const fs::path& file, const Scenario& s, const std::vector<SweepEntry>& sweep,
                           EdgeMeasure measure) {
    auto out = open_out(file);
    out << "beta,t";
    for (const auto& edge : s.topology.edges()) out << ",mean_" << edge.name << ",std_" << edge.name;
    out << '\n';
    for (const auto& entry : sweep) {
        const auto& st = entry.stats;
        for (std::size_t k = 0; k < st.times().size(); ++k) {
            out << beta_field(entry.beta) << ',' << format_double(st.times()[k]);
            for (EdgeId e = 0; e < st.num_edges(); ++e) {
                const auto& r = st.edge(measure, k, e);
                out << ',' << format_double(r.mean()) << ',' << format_double(std::sqrt(r.variance()));
            }
            out << '\n';
        }
    }
}

void write_network_means_csv(const fs::path& file, const std::vector<SweepEntry>& sweep) {
    auto out = open_out(file);
    out << "beta,samples,mean_q_net,var_q_net,mean_g_net_out,var_g_net_out\n";
    for (const auto& entry : sweep) {
        const auto& st = entry.stats;
        const std::size_t last = st.times().size() - 1;
        const auto& q = st.network(NetworkMeasure::QNet, last);
        const auto& g = st.network(NetworkMeasure::GOutNet, last);
        out << beta_field(entry.beta) << ',' << st.count() << ',' << format_double(q.mean()) << ','
            << format_double(q.variance()) << ',' << format_double(g.mean()) << ',' << format_double(g.variance())
            << '\n';
    }
}

void write_histogram_csv(const fs::path& file, const std::vector<SweepEntry>& sweep, NetworkMeasure measure) {
    auto out = open_out(file);
    out << "beta,bin_lo,bin_hi,count\n";
    for (const auto& entry : sweep) {
        const auto h = entry.stats.histogram(measure);
        for (std::size_t k = 0; k < h.counts.size(); ++k)
            out << beta_field(entry.beta) << ',' << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1])
                << ',' << h.counts[k] << '\n';
    }
}

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::optional<std::size_t> column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(std::distance(header.begin(), it));
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Table read_table(const fs::path& file) {
    std::ifstream in(file);
    Table t;
    std::string line;
    if (std::getline(in, line)) t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

double to_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("not a number: '" + s + "'");
    return v;
}

void check_path_csv(const fs::path& file, CheckReport& report) {
    const Table t = read_table(file);
    const std::string name = file.filename().string();
    const auto tc = t.column("t");
    const auto qn = t.column("q_net");
    const auto go = t.column("g_net_out");
    const auto gi = t.column("g_net_in");
    const auto ms = t.column("network_mass");
    if (!tc || !qn || !go || !gi || !ms || t.rows.empty()) {
        report.failures.push_back(name + ": missing columns or rows");
        return;
    }
    std::vector<std::size_t> queue_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c].rfind("queue_", 0) == 0) queue_cols.push_back(c);

    std::size_t bad_time = 0, bad_accum = 0, bad_queue = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size()) {
            report.failures.push_back(name + ": row " + std::to_string(r + 1) + " has the wrong field count");
            return;
        }
        for (std::size_t c : queue_cols)
            if (to_double(row[c]) < 0.0) ++bad_queue;
        if (r == 0) continue;
        const auto& prev = t.rows[r - 1];
        if (!(to_double(row[*tc]) > to_double(prev[*tc]))) ++bad_time;
        if (to_double(row[*qn]) < to_double(prev[*qn]) || to_double(row[*go]) < to_double(prev[*go])) ++bad_accum;
    }
    if (bad_time) report.failures.push_back(name + ": times not strictly increasing");
    if (bad_accum) report.failures.push_back(name + ": accumulated q_net or g_net_out decreases");
    if (bad_queue) report.failures.push_back(name + ": negative queue values");

    const auto& first = t.rows.front();
    const auto& last = t.rows.back();
    const double supplied = to_double(first[*ms]) + to_double(last[*gi]) - to_double(first[*gi]);
    const double held = to_double(last[*ms]) + to_double(last[*go]) - to_double(first[*go]);
    const double rel = std::abs(held - supplied) / std::max(1.0, std::abs(supplied));
    std::ostringstream os;
    os << name << ": mass balance relative error " << rel;
    if (rel <= 1e-8) report.notes.push_back(os.str());
    else report.failures.push_back(os.str() + " exceeds 1e-8");
}

void check_events_csv(const fs::path& file, CheckReport& report) {
    const Table t = read_table(file);
    const std::string name = file.filename().string();
    if (t.header != std::vector<std::string>{"time", "edge", "from", "to"}) {
        report.failures.push_back(name + ": unexpected header");
        return;
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != 4 || row[2] == row[3]) {
            report.failures.push_back(name + ": malformed event in row " + std::to_string(r + 1));
            return;
        }
        if (r > 0 && !(to_double(row[0]) > to_double(t.rows[r - 1][0]))) {
            report.failures.push_back(name + ": event times not strictly increasing");
            return;
        }
    }
    report.notes.push_back(name + ": " + std::to_string(t.rows.size()) + " events");
}

void check_histograms(const fs::path& dir, CheckReport& report) {
    const Table means = read_table(dir / "network_means.csv");
    std::map<std::string, double> samples;
    for (const auto& row : means.rows)
        if (row.size() >= 2) samples[row[0]] = to_double(row[1]);
    for (const char* hist : {"hist_qnet.csv", "hist_gout.csv"}) {
        if (!fs::exists(dir / hist)) continue;
        const Table t = read_table(dir / hist);
        std::map<std::string, double> totals;
        for (const auto& row : t.rows)
            if (row.size() == 4) totals[row[0]] += to_double(row[3]);
        for (const auto& [beta, count] : samples) {
            if (totals[beta] != count)
                report.failures.push_back(std::string(hist) + ": counts for beta '" + beta + "' do not sum to " +
                                          format_double(count));
        }
    }
}

void check_manifest(const fs::path& dir, CheckReport& report) {
    std::ifstream in(dir / "manifest.json");
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(in);
    } catch (const std::exception& ex) {
        report.failures.push_back(std::string("manifest.json: ") + ex.what());
        return;
    }
    if (m.contains("outputs"))
        for (const auto& f : m.at("outputs"))
            if (!fs::exists(dir / f.get<std::string>()))
                report.failures.push_back("manifest lists missing file " + f.get<std::string>());
    if (m.contains("scenario_file") && m.contains("scenario_sha256")) {
        const fs::path scenario = m.at("scenario_file").get<std::string>();
        if (fs::exists(scenario)) {
            if (sha256_file(scenario) != m.at("scenario_sha256").get<std::string>())
                report.failures.push_back("scenario file hash differs from the manifest");
            else
                report.notes.push_back("scenario hash matches");
        } else {
            report.notes.push_back("scenario file not found; hash not checked");
        }
    }
}

}  // namespace

CheckReport check_outputs(const fs::path& dir) {
    CheckReport report;
    if (!fs::is_directory(dir)) {
        report.failures.push_back(dir.string() + " is not a directory");
        return report;
    }
    bool found = false;
    try {
        if (fs::exists(dir / "manifest.json")) {
            found = true;
            check_manifest(dir, report);
        }
        if (fs::exists(dir / "path.csv")) {
            found = true;
            check_path_csv(dir / "path.csv", report);
        }
        if (fs::exists(dir / "events.csv")) {
            found = true;
            check_events_csv(dir / "events.csv", report);
        }
        if (fs::exists(dir / "network_means.csv")) {
            found = true;
            check_histograms(dir, report);
        }
    } catch (const std::exception& ex) {
        report.failures.push_back(ex.what());
    }
    if (!found) report.failures.push_back("no recognised output files in " + dir.string());
    return report;
}

}  // namespace pnsim
