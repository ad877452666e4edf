#include "flexent/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flexent/errors.hpp"

namespace flexent {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ValidationError("fmt_double: formatting failed");
    return {buf, p};
}

namespace {

std::string fmt_thz(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string strip_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] void cell_error(const std::string& label, int line, const std::string& col,
                             const std::string& msg) {
    throw ValidationError(label + ":" + std::to_string(line) + ": column '" + col +
                          "': " + msg);
}

double cell_double(const std::string& label, int line, const std::string& col,
                   const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        cell_error(label, line, col, "expected a number, got '" + v + "'");
    return out;
}

std::uint64_t cell_u64(const std::string& label, int line, const std::string& col,
                       const std::string& v) {
    if (!v.empty() && v[0] == '-')
        cell_error(label, line, col, "expected a nonnegative integer, got '" + v + "'");
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        cell_error(label, line, col, "expected a nonnegative integer, got '" + v + "'");
    return out;
}

int cell_int(const std::string& label, int line, const std::string& col,
             const std::string& v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        cell_error(label, line, col, "expected an integer, got '" + v + "'");
    return out;
}

// Verifies the header then yields rows of exactly `cols.size()` cells.
class CsvReader {
public:
    CsvReader(std::istream& in, std::string label, std::vector<std::string> cols)
        : in_(in), label_(std::move(label)), cols_(std::move(cols)) {
        std::string header;
        if (!std::getline(in_, header))
            throw ValidationError(label_ + ": empty file, expected header");
        header = strip_cr(header);
        std::string expected;
        for (std::size_t i = 0; i < cols_.size(); ++i) {
            if (i) expected += ',';
            expected += cols_[i];
        }
        if (header != expected)
            throw ValidationError(label_ + ":1: expected header '" + expected +
                                  "', got '" + header + "'");
        line_ = 1;
    }

    bool next(std::vector<std::string>& cells) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            line = strip_cr(line);
            if (line.empty()) continue;
            cells = split_csv(line);
            if (cells.size() != cols_.size())
                throw ValidationError(label_ + ":" + std::to_string(line_) + ": expected " +
                                      std::to_string(cols_.size()) + " columns, got " +
                                      std::to_string(cells.size()));
            return true;
        }
        return false;
    }

    int line() const { return line_; }
    const std::string& label() const { return label_; }
    const std::string& col(std::size_t i) const { return cols_[i]; }

private:
    std::istream& in_;
    std::string label_;
    std::vector<std::string> cols_;
    int line_ = 0;
};

} // namespace

// ---- plan --------------------------------------------------------------

void write_plan_csv(std::ostream& out, const std::vector<ChannelPair>& plan) {
    out << "k,signal_thz,idler_thz,width_ghz\n";
    for (const auto& p : plan)
        out << p.k << ',' << fmt_thz(p.signal_thz) << ',' << fmt_thz(p.idler_thz) << ','
            << fmt_double(p.width_ghz) << '\n';
}

std::vector<ChannelPair> read_plan_csv(std::istream& in, const std::string& label) {
    CsvReader r(in, label, {"k", "signal_thz", "idler_thz", "width_ghz"});
    std::vector<ChannelPair> out;
    std::vector<std::string> c;
    while (r.next(c)) {
        ChannelPair p;
        p.k = cell_int(label, r.line(), r.col(0), c[0]);
        p.signal_thz = cell_double(label, r.line(), r.col(1), c[1]);
        p.idler_thz = cell_double(label, r.line(), r.col(2), c[2]);
        p.width_ghz = cell_double(label, r.line(), r.col(3), c[3]);
        if (p.k < 1) cell_error(label, r.line(), r.col(0), "channel index must be >= 1");
        if (!(p.signal_thz > 0.0) || !(p.idler_thz > 0.0))
            cell_error(label, r.line(), r.col(1), "frequencies must be positive");
        out.push_back(p);
    }
    if (out.empty()) throw ValidationError(label + ": no channel rows");
    return out;
}

// ---- counts ------------------------------------------------------------

void write_counts_csv(std::ostream& out, const std::vector<CountRecord>& counts) {
    out << "channel,setting_a,setting_b,counts,integration_s\n";
    for (const auto& r : counts)
        out << r.channel << ',' << analyzer_label(r.setting.a) << ','
            << analyzer_label(r.setting.b) << ',' << r.counts << ','
            << fmt_double(r.integration_s) << '\n';
}

std::vector<CountRecord> read_counts_csv(std::istream& in, const std::string& label) {
    CsvReader r(in, label, {"channel", "setting_a", "setting_b", "counts", "integration_s"});
    std::vector<CountRecord> out;
    std::vector<std::string> c;
    while (r.next(c)) {
        CountRecord rec;
        rec.channel = cell_int(label, r.line(), r.col(0), c[0]);
        try {
            rec.setting.a = analyzer_from_label(c[1]);
        } catch (const UsageError& e) {
            cell_error(label, r.line(), r.col(1), e.what());
        }
        try {
            rec.setting.b = analyzer_from_label(c[2]);
        } catch (const UsageError& e) {
            cell_error(label, r.line(), r.col(2), e.what());
        }
        rec.counts = cell_u64(label, r.line(), r.col(3), c[3]);
        rec.integration_s = cell_double(label, r.line(), r.col(4), c[4]);
        if (!(rec.integration_s > 0.0))
            cell_error(label, r.line(), r.col(4), "integration time must be positive");
        out.push_back(rec);
    }
    if (out.empty()) throw ValidationError(label + ": no count rows");
    return out;
}

// ---- JSI ---------------------------------------------------------------

void write_jsi_csv(std::ostream& out, const JsiScan& scan) {
    out << "sig_ch,idl_ch,coinc,singles_s,singles_i,integration_s\n";
    for (const auto& e : scan.entries)
        out << e.sig_ch << ',' << e.idl_ch << ',' << e.coinc << ',' << e.singles_s << ','
            << e.singles_i << ',' << fmt_double(e.integration_s) << '\n';
}

JsiScan read_jsi_csv(std::istream& in, const std::string& label) {
    CsvReader r(in, label,
                {"sig_ch", "idl_ch", "coinc", "singles_s", "singles_i", "integration_s"});
    JsiScan scan;
    std::vector<std::string> c;
    while (r.next(c)) {
        JsiEntry e;
        e.sig_ch = cell_int(label, r.line(), r.col(0), c[0]);
        e.idl_ch = cell_int(label, r.line(), r.col(1), c[1]);
        e.coinc = cell_u64(label, r.line(), r.col(2), c[2]);
        e.singles_s = cell_u64(label, r.line(), r.col(3), c[3]);
        e.singles_i = cell_u64(label, r.line(), r.col(4), c[4]);
        e.integration_s = cell_double(label, r.line(), r.col(5), c[5]);
        if (!(e.integration_s > 0.0))
            cell_error(label, r.line(), r.col(5), "integration time must be positive");
        scan.entries.push_back(e);
    }
    if (scan.entries.empty()) throw ValidationError(label + ": no scan rows");
    return scan;
}

// ---- report ------------------------------------------------------------

void write_report_csv(std::ostream& out, const std::vector<EntanglementReport>& reports) {
    out << "k,fidelity,e_n,i_ab,i_ba,car,r_coinc,r_n,r_i\n";
    for (const auto& r : reports)
        out << r.k << ',' << fmt_double(r.fidelity) << ',' << fmt_double(r.e_n) << ','
            << fmt_double(r.i_ab) << ',' << fmt_double(r.i_ba) << ',' << fmt_double(r.car)
            << ',' << fmt_double(r.r_coinc) << ',' << fmt_double(r.r_n) << ','
            << fmt_double(r.r_i) << '\n';
}

std::vector<EntanglementReport> read_report_csv(std::istream& in, const std::string& label) {
    CsvReader r(in, label,
                {"k", "fidelity", "e_n", "i_ab", "i_ba", "car", "r_coinc", "r_n", "r_i"});
    std::vector<EntanglementReport> out;
    std::vector<std::string> c;
    while (r.next(c)) {
        EntanglementReport rep;
        rep.k = cell_int(label, r.line(), r.col(0), c[0]);
        rep.fidelity = cell_double(label, r.line(), r.col(1), c[1]);
        rep.e_n = cell_double(label, r.line(), r.col(2), c[2]);
        rep.i_ab = cell_double(label, r.line(), r.col(3), c[3]);
        rep.i_ba = cell_double(label, r.line(), r.col(4), c[4]);
        rep.car = cell_double(label, r.line(), r.col(5), c[5]);
        rep.r_coinc = cell_double(label, r.line(), r.col(6), c[6]);
        rep.r_n = cell_double(label, r.line(), r.col(7), c[7]);
        rep.r_i = cell_double(label, r.line(), r.col(8), c[8]);
        rep.u_a = ComplexMatrix::Identity(2, 2);
        rep.u_b = ComplexMatrix::Identity(2, 2);
        out.push_back(rep);
    }
    if (out.empty()) throw ValidationError(label + ": no report rows");
    return out;
}

// ---- requests ------------------------------------------------------------

void write_requests_csv(std::ostream& out, const std::vector<AllocationRequest>& reqs) {
    out << "id,target_ebr,priority\n";
    for (const auto& r : reqs)
        out << r.id << ',' << fmt_double(r.target_ebr) << ',' << r.priority << '\n';
}

std::vector<AllocationRequest> read_requests_csv(std::istream& in, const std::string& label) {
    CsvReader r(in, label, {"id", "target_ebr", "priority"});
    std::vector<AllocationRequest> out;
    std::vector<std::string> c;
    while (r.next(c)) {
        AllocationRequest req;
        req.id = c[0];
        if (req.id.empty()) cell_error(label, r.line(), r.col(0), "id must be non-empty");
        req.target_ebr = cell_double(label, r.line(), r.col(1), c[1]);
        if (!(req.target_ebr >= 0.0))
            cell_error(label, r.line(), r.col(1), "target must be nonnegative");
        req.priority = cell_int(label, r.line(), r.col(2), c[2]);
        out.push_back(req);
    }
    return out;
}

// ---- JSON ----------------------------------------------------------------

json matrix_to_json(const ComplexMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rrow = json::array(), irow = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rrow.push_back(m(i, j).real());
            irow.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j, const std::string& label) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im"))
        throw ValidationError(label + ": matrix JSON must have dim/re/im fields");
    const auto dim = j.at("dim").get<Eigen::Index>();
    if (dim < 1) throw ValidationError(label + ": matrix dim must be positive");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (!re.is_array() || !im.is_array() || re.size() != static_cast<std::size_t>(dim) ||
        im.size() != static_cast<std::size_t>(dim))
        throw ValidationError(label + ": re/im must be dim x dim arrays");
    ComplexMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& rrow = re.at(static_cast<std::size_t>(i));
        const auto& irow = im.at(static_cast<std::size_t>(i));
        if (rrow.size() != static_cast<std::size_t>(dim) ||
            irow.size() != static_cast<std::size_t>(dim))
            throw ValidationError(label + ": re/im must be dim x dim arrays");
        for (Eigen::Index jj = 0; jj < dim; ++jj)
            m(i, jj) = Complex(rrow.at(static_cast<std::size_t>(jj)).get<double>(),
                               irow.at(static_cast<std::size_t>(jj)).get<double>());
    }
    return m;
}

json density_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

DensityMatrix density_from_json(const json& j, const std::string& label) {
    try {
        return DensityMatrix(matrix_from_json(j, label));
    } catch (const ValidationError& e) {
        throw ValidationError(label + ": " + e.what());
    }
}

json posterior_to_json(const ChannelPosterior& p) {
    json j;
    j["channel"] = p.k;
    j["mean_state"] = density_to_json(p.summary.mean_state);
    j["fidelity_mean"] = p.summary.fidelity_mean;
    j["fidelity_std"] = p.summary.fidelity_std;
    j["acceptance_rate"] = p.summary.acceptance_rate;
    j["n_effective"] = p.summary.n_effective;
    j["beta_final"] = p.summary.beta_final;
    j["warning"] = p.summary.warning;
    return j;
}

ChannelPosterior posterior_from_json(const json& j, const std::string& label) {
    for (const char* key :
         {"channel", "mean_state", "fidelity_mean", "fidelity_std", "acceptance_rate",
          "n_effective", "beta_final", "warning"})
        if (!j.contains(key))
            throw ValidationError(label + ": posterior JSON missing field '" +
                                  std::string(key) + "'");
    ChannelPosterior p{j.at("channel").get<int>(),
                       PosteriorSummary{density_from_json(j.at("mean_state"), label),
                                        j.at("fidelity_mean").get<double>(),
                                        j.at("fidelity_std").get<double>(),
                                        j.at("acceptance_rate").get<double>(),
                                        j.at("n_effective").get<double>(),
                                        j.at("beta_final").get<double>(),
                                        j.at("warning").get<std::string>()}};
    return p;
}

json report_to_json(const std::vector<EntanglementReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) {
        json j;
        j["k"] = r.k;
        j["fidelity"] = r.fidelity;
        j["u_a"] = matrix_to_json(r.u_a);
        j["u_b"] = matrix_to_json(r.u_b);
        j["e_n"] = r.e_n;
        j["i_ab"] = r.i_ab;
        j["i_ba"] = r.i_ba;
        j["car"] = r.car;
        j["r_coinc"] = r.r_coinc;
        j["r_n"] = r.r_n;
        j["r_i"] = r.r_i;
        arr.push_back(std::move(j));
    }
    return json{{"channels", std::move(arr)}};
}

json allocation_to_json(const AllocationPlan& plan) {
    json assignments = json::array();
    for (const auto& a : plan.assignments)
        assignments.push_back(json{{"id", a.id},
                                   {"first_k", a.first_k},
                                   {"last_k", a.last_k},
                                   {"summed_r_i", a.summed_r_i}});
    return json{{"assignments", std::move(assignments)},
                {"ports_used_c", plan.ports_used_c},
                {"ports_used_l", plan.ports_used_l},
                {"unmet", plan.unmet},
                {"summed_r_i_note", plan.summed_r_i_note}};
}

// ---- path-level helpers ----------------------------------------------------

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ValidationError("write failed for '" + path + "'");
}

namespace {
std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return in;
}
} // namespace

std::vector<ChannelPair> load_plan(const std::string& path) {
    auto in = open_input(path);
    return read_plan_csv(in, path);
}

std::vector<CountRecord> load_counts(const std::string& path) {
    auto in = open_input(path);
    return read_counts_csv(in, path);
}

JsiScan load_jsi(const std::string& path) {
    auto in = open_input(path);
    return read_jsi_csv(in, path);
}

std::vector<EntanglementReport> load_report(const std::string& path) {
    auto in = open_input(path);
    return read_report_csv(in, path);
}

std::vector<AllocationRequest> load_requests(const std::string& path) {
    auto in = open_input(path);
    return read_requests_csv(in, path);
}

ChannelPosterior load_posterior(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
    return posterior_from_json(j, path);
}

} // namespace flexent
