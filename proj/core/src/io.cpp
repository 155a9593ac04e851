#include "latdim/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "latdim/error.hpp"

namespace latdim::io {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<Coord> parse_plain(std::string_view line, const std::string& where)
{
    std::vector<Coord> out;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t'))
            ++p;
        if (p == end)
            break;
        Coord v;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec == std::errc::result_out_of_range)
            throw RangeError(fmt::format("{}: integer out of int64 range", where));
        if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t'))
            throw ContractError(fmt::format("{}: expected whitespace-separated integers", where));
        out.push_back(v);
        p = next;
    }
    return out;
}

std::vector<Coord> parse_json_point(std::string_view line, const std::string& where)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractError(fmt::format("{}: {}", where, e.what()));
    }
    if (!j.is_array())
        throw ContractError(fmt::format("{}: expected a JSON array of integers", where));
    std::vector<Coord> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (v.is_number_integer() && !(v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)))
            out.push_back(v.get<Coord>());
        else if (v.is_number_unsigned())
            throw RangeError(fmt::format("{}: integer out of int64 range", where));
        else
            throw ContractError(fmt::format("{}: coordinates must be integers", where));
    }
    return out;
}

} // namespace

LatticeSet read_set(std::istream& in, std::string source_name)
{
    std::optional<std::size_t> dim;
    std::string provenance = source_name;
    std::vector<Coord> flat;
    std::string line;
    std::size_t lineno = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++lineno;
        auto s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        const std::string where = fmt::format("{}:{}", source_name, lineno);
        if (s.front() == '{') {
            if (!header_allowed)
                throw ContractError(fmt::format("{}: header object must precede all points", where));
            header_allowed = false;
            nlohmann::json h;
            try {
                h = nlohmann::json::parse(s);
            } catch (const nlohmann::json::parse_error& e) {
                throw ContractError(fmt::format("{}: bad header: {}", where, e.what()));
            }
            if (h.contains("dim"))
                dim = h.at("dim").get<std::size_t>();
            if (h.contains("provenance") && h.at("provenance").is_string())
                provenance = h.at("provenance").get<std::string>();
            continue;
        }
        header_allowed = false;
        auto pt = s.front() == '[' ? parse_json_point(s, where) : parse_plain(s, where);
        if (pt.empty())
            throw ContractError(fmt::format("{}: empty point", where));
        if (!dim)
            dim = pt.size();
        if (pt.size() != *dim)
            throw ContractError(fmt::format("{}: point has dimension {}, expected {}", where, pt.size(), *dim));
        flat.insert(flat.end(), pt.begin(), pt.end());
    }
    if (!dim)
        throw ContractError(fmt::format("{}: no points and no header; dimension unknown", source_name));
    return LatticeSet::from_flat(*dim, std::move(flat), std::move(provenance));
}

LatticeSet read_set(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractError(fmt::format("cannot open {}", path.string()));
    return read_set(in, path.string());
}

void write_set(std::ostream& out, const LatticeSet& set, const nlohmann::json& extra)
{
    nlohmann::json header = {{"dim", set.dim()}, {"provenance", set.provenance()}};
    for (const auto& [k, v] : extra.items())
        header[k] = v;
    out << header.dump() << '\n';
    fmt::memory_buffer buf;
    for (std::size_t i = 0; i < set.size(); ++i) {
        buf.clear();
        buf.push_back('[');
        auto p = set.point(i);
        for (std::size_t c = 0; c < p.size(); ++c) {
            if (c)
                buf.push_back(',');
            fmt::format_to(std::back_inserter(buf), "{}", p[c]);
        }
        buf.push_back(']');
        buf.push_back('\n');
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

void write_set(const std::filesystem::path& path, const LatticeSet& set, const nlohmann::json& extra)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ContractError(fmt::format("cannot write {}", path.string()));
    write_set(out, set, extra);
}

} // namespace latdim::io
