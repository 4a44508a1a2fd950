#include "xidps/sample_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "xidps/errors.hpp"
#include "xidps/rng.hpp"

namespace xidps {

namespace {

struct Weighted {
    std::vector<std::string> values;
    std::vector<double> weights;  // cumulative after normalization

    Weighted(std::initializer_list<std::pair<const char*, double>> items) {
        double total = 0.0;
        for (const auto& [v, w] : items) total += w;
        double acc = 0.0;
        for (const auto& [v, w] : items) {
            acc += w / total;
            values.emplace_back(v);
            weights.push_back(acc);
        }
    }

    const std::string& draw(Rng& rng) const {
        const double u = rng.uniform();
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (u < weights[i]) return values[i];
        return values.back();
    }
};

double lognormal(Rng& rng, double log_mean, double log_sd) {
    return std::exp(log_mean + log_sd * rng.normal());
}

std::string fmt(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Class-conditional generators. TTL, state, service and rate carry most of
// the class signal; the remaining columns are plausible low-signal noise.
struct ClassProfile {
    std::string name;
    double share;
    Weighted proto;
    Weighted service;
    Weighted state;
    Weighted sttl;
    Weighted dttl;
    double dur_mean, dur_sd;      // lognormal parameters
    double sbytes_mean, sbytes_sd;
    double dbytes_mean, dbytes_sd;
    double rate_mean, rate_sd;
    double pkt_mean;              // spkts scale
    double ct_burst;              // scale of the ct_* connection counters
};

const std::vector<ClassProfile>& profiles() {
    static const std::vector<ClassProfile> all = {
        {"Normal", 0.380,
         {{"tcp", 0.72}, {"udp", 0.25}, {"arp", 0.03}},
         {{"http", 0.30}, {"dns", 0.25}, {"smtp", 0.10}, {"ftp", 0.07}, {"ssh", 0.05}, {"-", 0.23}},
         {{"FIN", 0.75}, {"CON", 0.20}, {"INT", 0.05}},
         {{"62", 0.85}, {"63", 0.11}, {"254", 0.04}},
         {{"252", 0.82}, {"253", 0.14}, {"0", 0.04}},
         6.0, 1.2, 7.2, 1.4, 7.8, 1.5, 2.2, 1.1, 9.0, 4.0},
        {"Generic", 0.160,
         {{"udp", 0.92}, {"tcp", 0.08}},
         {{"dns", 0.85}, {"-", 0.15}},
         {{"INT", 0.70}, {"CON", 0.30}},
         {{"254", 0.94}, {"255", 0.03}, {"62", 0.03}},
         {{"0", 0.60}, {"252", 0.40}},
         1.0, 0.9, 5.0, 0.7, 3.2, 1.0, 6.8, 0.9, 1.4, 10.0},
        {"Exploits", 0.120,
         {{"tcp", 0.90}, {"udp", 0.10}},
         {{"http", 0.45}, {"ftp", 0.12}, {"smtp", 0.08}, {"-", 0.35}},
         {{"FIN", 0.60}, {"INT", 0.40}},
         {{"254", 0.60}, {"62", 0.40}},
         {{"252", 0.80}, {"0", 0.20}},
         4.5, 1.3, 8.4, 1.2, 6.4, 1.6, 4.0, 1.2, 4.2, 8.0},
        {"Fuzzers", 0.100,
         {{"tcp", 0.50}, {"udp", 0.45}, {"ospf", 0.05}},
         {{"-", 0.80}, {"http", 0.20}},
         {{"INT", 0.60}, {"FIN", 0.30}, {"CON", 0.10}},
         {{"254", 0.55}, {"62", 0.45}},
         {{"252", 0.55}, {"0", 0.45}},
         5.5, 1.6, 6.8, 1.1, 4.4, 1.8, 3.2, 1.4, 5.5, 6.0},
        {"DoS", 0.090,
         {{"tcp", 0.85}, {"udp", 0.15}},
         {{"-", 0.85}, {"http", 0.15}},
         {{"INT", 0.85}, {"FIN", 0.15}},
         {{"254", 0.94}, {"255", 0.02}, {"62", 0.04}},
         {{"0", 0.60}, {"252", 0.40}},
         2.2, 1.1, 6.0, 0.9, 2.6, 1.2, 8.0, 1.0, 7.5, 26.0},
        {"Reconnaissance", 0.060,
         {{"tcp", 0.70}, {"udp", 0.30}},
         {{"-", 0.70}, {"dns", 0.20}, {"http", 0.10}},
         {{"INT", 0.80}, {"REQ", 0.20}},
         {{"254", 0.92}, {"255", 0.05}, {"63", 0.03}},
         {{"252", 0.70}, {"0", 0.30}},
         0.4, 0.8, 4.4, 0.6, 2.8, 1.0, 5.4, 0.8, 1.2, 34.0},
        {"Analysis", 0.040,
         {{"tcp", 0.95}, {"udp", 0.05}},
         {{"-", 0.90}, {"http", 0.10}},
         {{"INT", 0.92}, {"FIN", 0.08}},
         {{"254", 0.96}, {"62", 0.04}},
         {{"0", 0.75}, {"252", 0.25}},
         1.4, 1.0, 4.8, 0.8, 1.8, 1.1, 4.6, 1.0, 1.6, 20.0},
        {"Backdoor", 0.030,
         {{"tcp", 0.90}, {"udp", 0.10}},
         {{"-", 0.80}, {"irc", 0.12}, {"http", 0.08}},
         {{"INT", 0.85}, {"FIN", 0.15}},
         {{"254", 0.91}, {"253", 0.05}, {"62", 0.04}},
         {{"252", 0.85}, {"0", 0.15}},
         2.8, 1.2, 5.2, 0.9, 3.4, 1.2, 5.8, 1.0, 2.4, 30.0},
        {"Shellcode", 0.015,
         {{"tcp", 1.0}},
         {{"-", 1.0}},
         {{"INT", 0.60}, {"FIN", 0.40}},
         {{"62", 0.85}, {"63", 0.15}},
         {{"252", 0.90}, {"0", 0.10}},
         1.8, 0.9, 5.6, 0.6, 3.0, 0.9, 4.4, 0.9, 2.0, 12.0},
        {"Worms", 0.005,
         {{"tcp", 1.0}},
         {{"http", 0.60}, {"-", 0.40}},
         {{"FIN", 1.0}},
         {{"62", 0.50}, {"254", 0.50}},
         {{"252", 1.0}},
         3.6, 1.0, 7.6, 0.8, 5.6, 1.2, 3.6, 1.0, 5.0, 7.0},
    };
    return all;
}

}  // namespace

void write_unsw_sample(const std::string& path, const SampleOptions& opts) {
    if (opts.rows < 100) throw Error(ErrorCode::ConfigError, "sample needs at least 100 rows");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);

    out << "id,dur,proto,service,state,spkts,dpkts,sbytes,dbytes,rate,sttl,dttl,sload,dload,"
           "sloss,dloss,sinpkt,dinpkt,sjit,djit,swin,stcpb,dtcpb,dwin,tcprtt,synack,ackdat,"
           "smean,dmean,trans_depth,response_body_len,ct_srv_src,ct_state_ttl,ct_dst_ltm,"
           "ct_src_dport_ltm,ct_dst_sport_ltm,ct_dst_src_ltm,is_ftp_login,ct_ftp_cmd,"
           "ct_flw_http_mthd,ct_src_ltm,ct_srv_dst,is_sm_ips_ports,attack_cat,label\n";

    // exact per-class counts, remainder to the majority class
    const auto& profs = profiles();
    std::vector<std::size_t> counts(profs.size());
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < profs.size(); ++c) {
        counts[c] = static_cast<std::size_t>(profs[c].share * static_cast<double>(opts.rows));
        assigned += counts[c];
    }
    counts[0] += opts.rows - assigned;

    std::vector<std::size_t> class_of_row;
    class_of_row.reserve(opts.rows);
    for (std::size_t c = 0; c < profs.size(); ++c)
        class_of_row.insert(class_of_row.end(), counts[c], c);
    Rng order_rng(opts.seed);
    order_rng.shuffle(class_of_row);

    Rng rng(opts.seed + 1);
    for (std::size_t r = 0; r < opts.rows; ++r) {
        const ClassProfile& label_pf = profs[class_of_row[r]];
        // a slice of traffic looks like another class entirely; this keeps a
        // floor of irreducible error like real capture data has
        const ClassProfile* feat = &label_pf;
        if (class_of_row[r] != 0 && rng.uniform() < 0.03) {
            feat = &profs[0];
        } else if (class_of_row[r] == 0 && rng.uniform() < 0.02) {
            feat = &profs[1 + rng.uniform_int(profs.size() - 1)];
        }
        const ClassProfile& pf = *feat;
        const std::string& proto = pf.proto.draw(rng);
        const std::string& service = pf.service.draw(rng);
        const std::string& state = pf.state.draw(rng);
        const bool tcp = proto == "tcp";
        const bool http = service == "http";
        const bool ftp = service == "ftp";

        const double dur = lognormal(rng, pf.dur_mean - 6.0, pf.dur_sd);  // seconds
        const double sbytes = std::ceil(lognormal(rng, pf.sbytes_mean, pf.sbytes_sd));
        const double dbytes = std::ceil(lognormal(rng, pf.dbytes_mean, pf.dbytes_sd));
        const double rate = lognormal(rng, pf.rate_mean, pf.rate_sd);
        const double spkts = std::ceil(lognormal(rng, pf.pkt_mean, 0.8));
        const double dpkts = std::ceil(lognormal(rng, pf.pkt_mean - 0.5, 0.9));
        const double sload = rate * 8.0 * lognormal(rng, 3.0, 0.6);
        const double dload = dbytes > 1.0 ? sload * lognormal(rng, -1.0, 0.8) : 0.0;
        const double sloss = std::floor(spkts * rng.uniform() * 0.12);
        const double dloss = std::floor(dpkts * rng.uniform() * 0.12);
        const double sinpkt = dur * 1000.0 / std::max(1.0, spkts);
        const double dinpkt = dur * 1000.0 / std::max(1.0, dpkts);
        const double sjit = sinpkt * lognormal(rng, -1.2, 0.7);
        const double djit = dinpkt * lognormal(rng, -1.2, 0.7);
        const double swin = tcp ? 255.0 : 0.0;
        const double stcpb = tcp ? std::floor(rng.uniform() * 4.2e9) : 0.0;
        const double dtcpb = tcp ? std::floor(rng.uniform() * 4.2e9) : 0.0;
        const double dwin = tcp ? 255.0 : 0.0;
        const double tcprtt = tcp ? lognormal(rng, -3.2, 0.5) : 0.0;
        const double synack = tcp ? tcprtt * (0.4 + 0.2 * rng.uniform()) : 0.0;
        const double ackdat = tcp ? tcprtt - synack : 0.0;
        const double smean = std::ceil(sbytes / std::max(1.0, spkts));
        const double dmean = std::ceil(dbytes / std::max(1.0, dpkts));
        const double trans_depth = http ? std::floor(1.0 + rng.uniform() * 2.0) : 0.0;
        const double response_body_len = http ? std::floor(dbytes * 0.7) : 0.0;
        const double burst = pf.ct_burst;
        auto ct = [&](double scale) {
            return std::floor(1.0 + rng.uniform() * scale);
        };
        const double ct_srv_src = ct(burst);
        const double ct_state_ttl = ct(burst * 0.4 + 1.0);
        const double ct_dst_ltm = ct(burst * 0.6 + 1.0);
        const double ct_src_dport_ltm = ct(burst * 0.8 + 1.0);
        const double ct_dst_sport_ltm = ct(burst * 0.9 + 1.0);
        const double ct_dst_src_ltm = ct(burst * 0.7 + 1.0);
        const double is_ftp_login = ftp && rng.uniform() < 0.6 ? 1.0 : 0.0;
        const double ct_ftp_cmd = is_ftp_login > 0.0 ? std::floor(1.0 + rng.uniform() * 4.0) : 0.0;
        const double ct_flw_http_mthd = http ? std::floor(1.0 + rng.uniform() * 3.0) : 0.0;
        const double ct_src_ltm = ct(burst * 0.5 + 1.0);
        const double ct_srv_dst = ct(burst);
        const double is_sm_ips_ports = rng.uniform() < 0.002 ? 1.0 : 0.0;
        const int label = label_pf.name == "Normal" ? 0 : 1;

        out << (r + 1) << ',' << fmt(dur) << ',' << proto << ',' << service << ',' << state << ','
            << fmt(spkts) << ',' << fmt(dpkts) << ',' << fmt(sbytes) << ',' << fmt(dbytes) << ','
            << fmt(rate) << ',' << pf.sttl.draw(rng) << ',' << pf.dttl.draw(rng) << ','
            << fmt(sload) << ',' << fmt(dload) << ',' << fmt(sloss) << ',' << fmt(dloss) << ','
            << fmt(sinpkt) << ',' << fmt(dinpkt) << ',' << fmt(sjit) << ',' << fmt(djit) << ','
            << fmt(swin) << ',' << fmt(stcpb) << ',' << fmt(dtcpb) << ',' << fmt(dwin) << ','
            << fmt(tcprtt) << ',' << fmt(synack) << ',' << fmt(ackdat) << ',' << fmt(smean) << ','
            << fmt(dmean) << ',' << fmt(trans_depth) << ',' << fmt(response_body_len) << ','
            << fmt(ct_srv_src) << ',' << fmt(ct_state_ttl) << ',' << fmt(ct_dst_ltm) << ','
            << fmt(ct_src_dport_ltm) << ',' << fmt(ct_dst_sport_ltm) << ',' << fmt(ct_dst_src_ltm)
            << ',' << fmt(is_ftp_login) << ',' << fmt(ct_ftp_cmd) << ',' << fmt(ct_flw_http_mthd)
            << ',' << fmt(ct_src_ltm) << ',' << fmt(ct_srv_dst) << ',' << fmt(is_sm_ips_ports)
            << ',' << label_pf.name << ',' << label << "\n";
    }
}

std::vector<std::vector<FeedEvent>> feeds_from_table(const RawTable& table,
                                                     std::size_t max_events,
                                                     const std::vector<std::string>& sources) {
    if (sources.empty()) throw Error(ErrorCode::ConfigError, "need at least one source tag");
    for (const auto& s : sources) {
        if (!valid_source_tag(s))
            throw Error(ErrorCode::ConfigError, "unknown source tag " + s);
    }
    const auto features = table.schema.feature_indices();
    std::vector<std::vector<FeedEvent>> feeds(sources.size());
    std::vector<std::int64_t> next_t(sources.size(), 1);

    const std::size_t n = std::min(max_events, table.n_rows());
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t s = r % sources.size();
        FeedEvent e;
        e.t = next_t[s]++;
        e.source = sources[s];
        e.values.reserve(features.size());
        for (std::size_t f : features) e.values.push_back(table.rows[r][f]);
        e.id = e.source + "-" + std::to_string(e.t);
        feeds[s].push_back(std::move(e));
    }
    return feeds;
}

}  // namespace xidps
