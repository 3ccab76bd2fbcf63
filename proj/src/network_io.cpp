#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "rephase/csv.hpp"
#include "rephase/network.hpp"

namespace rephase {

namespace {

enum class Section { none, base, buses, segments, loads, pv };

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NetworkError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class LineReader {
  public:
    LineReader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    // Next non-blank line with comments stripped.
    bool next(std::string_view& line) {
        while (!done_) {
            auto end = text_.find('\n', pos_);
            if (end == std::string_view::npos) {
                end = text_.size();
                done_ = true;
            }
            std::string_view raw = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_no_;
            if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
            raw = csv::trim(raw);
            if (!raw.empty()) {
                line = raw;
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw NetworkError(std::string(source_) + ":" + std::to_string(line_no_) + ": " + what);
    }

  private:
    std::string_view text_;
    std::string_view source_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
    bool done_ = false;
};

const char* section_name(Section s) {
    switch (s) {
        case Section::base: return "base";
        case Section::buses: return "buses";
        case Section::segments: return "segments";
        case Section::loads: return "loads";
        case Section::pv: return "pv";
        case Section::none: break;
    }
    return "(none)";
}

}  // namespace

Network parse_network(std::string_view text, std::string_view source_name) {
    LineReader reader(text, source_name);
    Section section = Section::none;
    SystemBase base;
    std::vector<int> bus_ids;
    std::vector<LineSegment> segments;
    std::vector<LoadPoint> loads;
    std::vector<PVUnit> pvs;
    bool saw_content = false;

    std::string_view line;
    while (reader.next(line)) {
        saw_content = true;
        if (line.front() == '[') {
            if (line.back() != ']') reader.fail("malformed section header '" + std::string(line) + "'");
            const auto name = csv::trim(line.substr(1, line.size() - 2));
            if (name == "base") section = Section::base;
            else if (name == "buses") section = Section::buses;
            else if (name == "segments") section = Section::segments;
            else if (name == "loads") section = Section::loads;
            else if (name == "pv") section = Section::pv;
            else reader.fail("unknown section '" + std::string(name) + "'");
            continue;
        }

        const auto fields = csv::split(line);
        const std::string where = section_name(section);
        auto number = [&](std::size_t i, const char* field) {
            try {
                return csv::to_double(fields.at(i));
            } catch (const std::exception& e) {
                reader.fail(where + ": field " + std::to_string(i + 1) + " (" + field + "): " + e.what());
            }
        };
        auto integer = [&](std::size_t i, const char* field) {
            try {
                return static_cast<int>(csv::to_int(fields.at(i)));
            } catch (const std::exception& e) {
                reader.fail(where + ": field " + std::to_string(i + 1) + " (" + field + "): " + e.what());
            }
        };
        auto expect_fields = [&](std::size_t n) {
            if (fields.size() != n)
                reader.fail(where + ": expected " + std::to_string(n) + " fields, found " +
                            std::to_string(fields.size()));
        };

        switch (section) {
            case Section::none:
                reader.fail("data before the first section header");
            case Section::base: {
                expect_fields(2);
                if (fields[0] == "volts_ln") base.volts_ln = number(1, "volts_ln");
                else if (fields[0] == "kva") base.kva = number(1, "kva");
                else reader.fail("base: unknown key '" + fields[0] + "'");
                break;
            }
            case Section::buses: {
                expect_fields(1);
                bus_ids.push_back(integer(0, "id"));
                break;
            }
            case Section::segments: {
                expect_fields(3 + 32);
                LineSegment s;
                s.from_bus = integer(0, "from");
                s.to_bus = integer(1, "to");
                s.length_km = number(2, "length_km");
                for (std::size_t k = 0; k < 16; ++k) {
                    const double re = number(3 + 2 * k, "z_re");
                    const double im = number(4 + 2 * k, "z_im");
                    s.z_per_km[k / 4][k % 4] = Complex(re, im);
                }
                segments.push_back(s);
                break;
            }
            case Section::loads: {
                expect_fields(5);
                LoadPoint l;
                l.bus = integer(0, "bus");
                l.p_max_kw = {number(1, "pa"), number(2, "pb"), number(3, "pc")};
                l.power_factor = number(4, "pf");
                loads.push_back(l);
                break;
            }
            case Section::pv: {
                expect_fields(4);
                PVUnit pv;
                pv.id = integer(0, "id");
                pv.bus = integer(1, "bus");
                auto phase = parse_phase(fields[2]);
                if (!phase) reader.fail("pv: field 3 (phase): expected a, b or c, got '" + fields[2] + "'");
                pv.default_phase = *phase;
                pv.capacity_kw = number(3, "kw");
                pvs.push_back(pv);
                break;
            }
        }
    }

    if (!saw_content) throw NetworkError(std::string(source_name) + ": empty network file");
    if (bus_ids.empty()) throw NetworkError(std::string(source_name) + ": no [buses] entries");

    std::set<int> unique(bus_ids.begin(), bus_ids.end());
    if (unique.size() != bus_ids.size())
        throw NetworkError(std::string(source_name) + ": duplicate bus id in [buses]");
    const int n = static_cast<int>(bus_ids.size());
    if (*unique.begin() != 0 || *unique.rbegin() != n - 1)
        throw NetworkError(std::string(source_name) + ": bus ids must be exactly 0.." + std::to_string(n - 1));

    try {
        return Network::create(n, std::move(segments), std::move(loads), std::move(pvs), base);
    } catch (const NetworkError& e) {
        throw NetworkError(std::string(source_name) + ": " + e.what());
    }
}

Network load_network(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    return parse_network(text, path.string());
}

void write_network(std::ostream& out, const Network& net) {
    char buf[64];
    auto g = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "[base]\n";
    out << "volts_ln, " << g(net.base().volts_ln) << "\n";
    out << "kva, " << g(net.base().kva) << "\n\n";
    out << "[buses]\n";
    for (int b = 0; b < net.bus_count(); ++b) out << b << "\n";
    out << "\n[segments]\n";
    for (const auto& s : net.segments()) {
        out << s.from_bus << ", " << s.to_bus << ", " << g(s.length_km);
        for (const auto& row : s.z_per_km)
            for (const auto& z : row) out << ", " << g(z.real()) << ", " << g(z.imag());
        out << "\n";
    }
    out << "\n[loads]\n";
    for (const auto& l : net.loads())
        out << l.bus << ", " << g(l.p_max_kw[0]) << ", " << g(l.p_max_kw[1]) << ", "
            << g(l.p_max_kw[2]) << ", " << g(l.power_factor) << "\n";
    out << "\n[pv]\n";
    for (const auto& pv : net.pv_units())
        out << pv.id << ", " << pv.bus << ", " << to_char(pv.default_phase) << ", " << g(pv.capacity_kw) << "\n";
}

HourlyProfiles parse_profiles(std::string_view text, std::string_view source_name) {
    LineReader reader(text, source_name);
    HourlyProfiles profiles;
    std::array<bool, 24> seen{};
    int rows = 0;
    std::string_view line;
    bool first = true;
    while (reader.next(line)) {
        const auto fields = csv::split(line);
        if (first && !fields.empty() && fields[0] == "hour") {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() != 3) reader.fail("profiles: expected 3 fields (hour, pv_factor, load_factor)");
        int hour = 0;
        double pv = 0.0, load = 0.0;
        try {
            hour = static_cast<int>(csv::to_int(fields[0]));
            pv = csv::to_double(fields[1]);
            load = csv::to_double(fields[2]);
        } catch (const std::exception& e) {
            reader.fail(std::string("profiles: ") + e.what());
        }
        if (hour < 0 || hour > 23) reader.fail("profiles: hour must be in 0..23");
        if (seen[hour]) reader.fail("profiles: duplicate hour " + std::to_string(hour));
        if (!(pv >= 0.0 && pv <= 1.0)) reader.fail("profiles: pv_factor must be in [0, 1]");
        if (!(load >= 0.0 && load <= 1.0)) reader.fail("profiles: load_factor must be in [0, 1]");
        seen[hour] = true;
        profiles.pv_factor[hour] = pv;
        profiles.load_factor[hour] = load;
        ++rows;
    }
    if (rows != 24)
        throw NetworkError(std::string(source_name) + ": profiles need 24 hourly rows, found " + std::to_string(rows));
    return profiles;
}

HourlyProfiles load_profiles(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    return parse_profiles(text, path.string());
}

}  // namespace rephase
