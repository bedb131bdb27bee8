#include "record.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace rabitrack {

namespace {

constexpr char kBinaryMagic[8] = {'R', 'B', 'T', 'R', 'E', 'C', 'v', '1'};

double parse_time_or_inf(const std::string& v, const std::string& key) {
    if (v == "inf" || v == "Inf" || v == "INF") return std::numeric_limits<double>::infinity();
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw std::runtime_error("record: bad value for " + key + ": '" + v + "'");
    }
}

std::string format_time_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

ReadoutRecord simulate_record(const OmegaProfile& profile,
                              const MeasurementModel& model,
                              std::size_t n_steps, const ParaState& initial,
                              std::uint64_t seed, SimDiagnostics* diagnostics) {
    if (n_steps < 1) throw std::invalid_argument("simulate: n_steps must be >= 1");
    const double horizon = static_cast<double>(n_steps) * model.dt_us;
    if (profile.defined_until_us() < horizon - 0.5 * model.dt_us) {
        std::ostringstream msg;
        msg << "simulate: profile defined up to " << profile.defined_until_us()
            << " us but the record runs to " << horizon << " us";
        throw std::invalid_argument(msg.str());
    }

    ReadoutRecord rec;
    rec.samples.resize(n_steps);
    rec.dt_us = model.dt_us;
    rec.model = model;
    rec.seed = seed;
    rec.profile_id = profile.describe();

    Rng rng(seed);
    const bool ideal = model.ideal();
    const double sigma = model.noise_std();
    const double inv_tau = 1.0 / model.tau_m_us;
    const double exy = ideal ? 1.0 : std::exp(-model.gamma() * model.dt_us);

    ParaState s = initial.normalized();
    if (diagnostics) diagnostics->z.reserve(n_steps);

    for (std::size_t j = 0; j < n_steps; ++j) {
        const double zj = std::clamp(s.z, -1.0, 1.0);
        if (diagnostics) diagnostics->z.push_back(zj);

        const double p_excited = 0.5 * (1.0 + zj);
        const double mean = rng.uniform() < p_excited ? 1.0 : -1.0;
        const double r = mean + sigma * rng.gaussian();
        rec.samples[j] = r;

        // measurement step
        double x = s.x, y = s.y, z = s.z, p = s.p;
        if (ideal) {
            const double a = r * model.dt_us * inv_tau;
            const double ch = std::cosh(a), sh = std::sinh(a);
            const double z2 = ch * z + sh * p;
            const double p2 = sh * z + ch * p;
            z = z2;
            p = p2;
        } else {
            const auto zp = nonideal_zp_block(r, model);
            const double z2 = zp[0] * z + zp[1] * p;
            const double p2 = zp[2] * z + zp[3] * p;
            x *= exy;
            y *= exy;
            z = z2;
            p = p2;
        }

        // drive step, frequency held constant over the bin
        const double f = profile.f_mhz_at(static_cast<double>(j) * model.dt_us);
        const double th = kTwoPi * f * model.dt_us;
        const double c = std::cos(th), sn = std::sin(th);
        const double x2 = c * x - sn * z;
        const double z2 = sn * x + c * z;

        s = ParaState{x2 / p, y / p, z2 / p, 1.0};
    }
    if (diagnostics) diagnostics->final_state = s;
    return rec;
}

void save_record(const ReadoutRecord& record, const std::string& path, RecordFormat format) {
    if (format == RecordFormat::Csv) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("record: cannot open " + path + " for writing");
        out << "# rabitrack record v1\n";
        out << "# n=" << record.samples.size() << "\n";
        out.precision(17);
        out << "# dt_us=" << record.dt_us << "\n";
        out << "# tau_m_us=" << record.model.tau_m_us << "\n";
        out << "# eta=" << record.model.eta << "\n";
        out << "# t1_us=" << format_time_or_inf(record.model.t1_us) << "\n";
        out << "# t2_us=" << format_time_or_inf(record.model.t2_us) << "\n";
        out << "# seed=" << record.seed << "\n";
        if (!record.profile_id.empty()) out << "# profile=" << record.profile_id << "\n";
        for (double r : record.samples) out << r << "\n";
        if (!out) throw std::runtime_error("record: write failed for " + path);
        return;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("record: cannot open " + path + " for writing");
    std::array<char, 64> header{};
    std::memcpy(header.data(), kBinaryMagic, 8);
    const std::uint64_t n = record.samples.size();
    std::memcpy(header.data() + 8, &n, 8);
    std::memcpy(header.data() + 16, &record.dt_us, 8);
    std::memcpy(header.data() + 24, &record.model.tau_m_us, 8);
    std::memcpy(header.data() + 32, &record.model.eta, 8);
    std::memcpy(header.data() + 40, &record.model.t1_us, 8);
    std::memcpy(header.data() + 48, &record.model.t2_us, 8);
    std::memcpy(header.data() + 56, &record.seed, 8);
    out.write(header.data(), header.size());
    out.write(reinterpret_cast<const char*>(record.samples.data()),
              static_cast<std::streamsize>(record.samples.size() * sizeof(double)));
    if (!out) throw std::runtime_error("record: write failed for " + path);
}

namespace {

ReadoutRecord load_record_csv(std::istream& in, const std::string& path) {
    std::string line;
    std::size_t expected_n = 0;
    bool have_n = false;
    double dt = 0.0, tau_m = 0.0, eta = 1.0;
    double t1 = std::numeric_limits<double>::infinity();
    double t2 = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    std::string profile_id;
    std::vector<double> samples;

    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;  // freeform comment
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            const std::string value = line.substr(eq + 1);
            if (key == "n") {
                expected_n = std::stoull(value);
                have_n = true;
            } else if (key == "dt_us") {
                dt = parse_time_or_inf(value, key);
            } else if (key == "tau_m_us") {
                tau_m = parse_time_or_inf(value, key);
            } else if (key == "eta") {
                eta = parse_time_or_inf(value, key);
            } else if (key == "t1_us") {
                t1 = parse_time_or_inf(value, key);
            } else if (key == "t2_us") {
                t2 = parse_time_or_inf(value, key);
            } else if (key == "seed") {
                seed = std::stoull(value);
            } else if (key == "profile") {
                profile_id = value;
            }
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) {
            std::ostringstream msg;
            msg << "record: " << path << ":" << lineno << ": expected a sample, got '" << line << "'";
            throw std::runtime_error(msg.str());
        }
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "record: " << path << ":" << lineno << ": non-finite sample";
            throw std::runtime_error(msg.str());
        }
        samples.push_back(v);
    }
    if (!have_n || dt <= 0.0 || tau_m <= 0.0)
        throw std::runtime_error("record: " + path + ": missing or invalid header (need n, dt_us, tau_m_us)");
    if (samples.size() != expected_n) {
        std::ostringstream msg;
        msg << "record: " << path << ": header says n=" << expected_n << " but file has "
            << samples.size() << " samples";
        throw std::runtime_error(msg.str());
    }

    ReadoutRecord rec;
    rec.samples = std::move(samples);
    rec.dt_us = dt;
    rec.model = make_measurement_model(tau_m, dt, eta, t1, t2);
    rec.seed = seed;
    rec.profile_id = profile_id;
    return rec;
}

ReadoutRecord load_record_binary(std::istream& in, const std::string& path) {
    std::array<char, 64> header{};
    in.read(header.data(), header.size());
    if (in.gcount() != 64 || std::memcmp(header.data(), kBinaryMagic, 8) != 0)
        throw std::runtime_error("record: " + path + ": malformed binary header");
    std::uint64_t n = 0;
    double dt, tau_m, eta, t1, t2;
    std::uint64_t seed;
    std::memcpy(&n, header.data() + 8, 8);
    std::memcpy(&dt, header.data() + 16, 8);
    std::memcpy(&tau_m, header.data() + 24, 8);
    std::memcpy(&eta, header.data() + 32, 8);
    std::memcpy(&t1, header.data() + 40, 8);
    std::memcpy(&t2, header.data() + 48, 8);
    std::memcpy(&seed, header.data() + 56, 8);

    std::vector<double> samples(n);
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::uint64_t>(in.gcount()) != n * sizeof(double))
        throw std::runtime_error("record: " + path + ": truncated sample block");
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("record: " + path + ": trailing bytes after sample block");
    for (double v : samples)
        if (!std::isfinite(v)) throw std::runtime_error("record: " + path + ": non-finite sample");

    ReadoutRecord rec;
    rec.samples = std::move(samples);
    rec.dt_us = dt;
    rec.model = make_measurement_model(tau_m, dt, eta, t1, t2);
    rec.seed = seed;
    return rec;
}

}  // namespace

ReadoutRecord load_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("record: cannot open " + path);
    const int first = in.peek();
    if (first == 'R') return load_record_binary(in, path);
    return load_record_csv(in, path);
}

}  // namespace rabitrack
