#include "rmup/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rmup/errors.hpp"

namespace rmup::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    return f;
}

double parse_double(std::string_view tok, const std::filesystem::path& path, long line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(path.string(), line,
                         "non-numeric cell '" + std::string(tok) + "'");
    return v;
}

long parse_long(std::string_view tok, const std::filesystem::path& path, long line) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(path.string(), line,
                         "non-integer cell '" + std::string(tok) + "'");
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// strips trailing \r from files written on other platforms
void chomp(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_grid(const GridSpec& grid, const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "nx=" << grid.nx() << "\n"
      << "ny=" << grid.ny() << "\n"
      << "nz=" << grid.nz() << "\n"
      << "dx=" << format_value(grid.dx()) << "\n"
      << "dy=" << format_value(grid.dy()) << "\n"
      << "dz=" << format_value(grid.dz()) << "\n"
      << "x0=" << format_value(grid.origin().x) << "\n"
      << "y0=" << format_value(grid.origin().y) << "\n"
      << "z0=" << format_value(grid.origin().z) << "\n";
}

GridSpec read_grid(const std::filesystem::path& path) {
    auto f = open_in(path);
    std::map<std::string, double> kv;
    std::string line;
    long lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        chomp(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path.string(), lineno, "expected key=value");
        const std::string key = line.substr(0, eq);
        kv[key] = parse_double(std::string_view(line).substr(eq + 1), path, lineno);
    }
    for (const char* key : {"nx", "ny", "nz", "dx", "dy", "dz", "x0", "y0", "z0"})
        if (!kv.count(key))
            throw ParseError(path.string(), lineno, std::string("missing key ") + key);
    return GridSpec(static_cast<int>(kv["nx"]), static_cast<int>(kv["ny"]),
                    static_cast<int>(kv["nz"]), kv["dx"], kv["dy"], kv["dz"],
                    {kv["x0"], kv["y0"], kv["z0"]});
}

void write_ensemble(const Ensemble& e, const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "block_index,realisation";
    for (const auto& name : e.variable_names()) f << ',' << name;
    f << '\n';
    for (int b = 0; b < e.n_blocks(); ++b)
        for (int r = 0; r < e.n_real(); ++r) {
            f << b << ',' << r;
            for (int v = 0; v < e.n_vars(); ++v) f << ',' << format_value(e.at(r, b, v));
            f << '\n';
        }
}

Ensemble read_ensemble(const std::filesystem::path& path, const std::string& id) {
    auto f = open_in(path);
    std::string line;
    long lineno = 1;
    if (!std::getline(f, line)) throw ParseError(path.string(), 1, "empty file");
    chomp(line);
    auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "block_index" || header[1] != "realisation")
        throw ParseError(path.string(), 1,
                         "malformed header, expected block_index,realisation,<vars...>");
    std::vector<std::string> names(header.begin() + 2, header.end());
    const int n_vars = static_cast<int>(names.size());

    struct Row {
        int block, real;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    int max_block = -1, max_real = -1;
    while (std::getline(f, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (static_cast<int>(cells.size()) != 2 + n_vars)
            throw ParseError(path.string(), lineno,
                             "expected " + std::to_string(2 + n_vars) + " cells, got " +
                                 std::to_string(cells.size()));
        Row row;
        row.block = static_cast<int>(parse_long(cells[0], path, lineno));
        row.real = static_cast<int>(parse_long(cells[1], path, lineno));
        if (row.block < 0 || row.real < 0)
            throw ParseError(path.string(), lineno, "negative index");
        row.values.reserve(n_vars);
        for (int v = 0; v < n_vars; ++v)
            row.values.push_back(parse_double(cells[2 + v], path, lineno));
        max_block = std::max(max_block, row.block);
        max_real = std::max(max_real, row.real);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path.string(), lineno, "no data rows");
    const int n_blocks = max_block + 1;
    const int n_real = max_real + 1;
    if (rows.size() != static_cast<std::size_t>(n_blocks) * n_real)
        throw ParseError(path.string(), lineno,
                         "row-count mismatch: got " + std::to_string(rows.size()) +
                             " rows for " + std::to_string(n_blocks) + " blocks x " +
                             std::to_string(n_real) + " realisations");

    Ensemble e(n_real, n_blocks, std::move(names), id);
    std::vector<char> seen(rows.size(), 0);
    for (const auto& row : rows) {
        const std::size_t slot =
            static_cast<std::size_t>(row.block) * n_real + row.real;
        if (seen[slot])
            throw ParseError(path.string(), 0,
                             "duplicate (block,realisation) pair (" +
                                 std::to_string(row.block) + "," +
                                 std::to_string(row.real) + ")");
        seen[slot] = 1;
        for (int v = 0; v < n_vars; ++v) e.at(row.real, row.block, v) = row.values[v];
    }
    return e;
}

void write_observations(const std::vector<ObservationSet>& sets,
                        const std::vector<std::string>& variable_names,
                        const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "period,block_index";
    for (const auto& name : variable_names) f << ',' << name;
    f << '\n';
    for (const auto& set : sets)
        for (const auto& rec : set.records()) {
            f << set.period() << ',' << rec.block_index;
            for (double v : rec.values) f << ',' << format_value(v);
            f << '\n';
        }
}

std::vector<ObservationSet> read_observations(const std::filesystem::path& path,
                                              const ErrorSpec& error) {
    auto f = open_in(path);
    std::string line;
    long lineno = 1;
    if (!std::getline(f, line)) throw ParseError(path.string(), 1, "empty file");
    chomp(line);
    auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "period" || header[1] != "block_index")
        throw ParseError(path.string(), 1,
                         "malformed header, expected period,block_index,<vars...>");
    const int n_vars = static_cast<int>(header.size()) - 2;

    std::map<int, std::vector<ObservationRecord>> by_period;
    while (std::getline(f, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (static_cast<int>(cells.size()) != 2 + n_vars)
            throw ParseError(path.string(), lineno,
                             "expected " + std::to_string(2 + n_vars) + " cells, got " +
                                 std::to_string(cells.size()));
        const int period = static_cast<int>(parse_long(cells[0], path, lineno));
        ObservationRecord rec;
        rec.block_index = static_cast<int>(parse_long(cells[1], path, lineno));
        rec.values.reserve(n_vars);
        for (int v = 0; v < n_vars; ++v)
            rec.values.push_back(parse_double(cells[2 + v], path, lineno));
        by_period[period].push_back(std::move(rec));
    }
    std::vector<ObservationSet> sets;
    sets.reserve(by_period.size());
    for (auto& [period, records] : by_period)
        sets.emplace_back(period, std::move(records), error);
    return sets;
}

}  // namespace rmup::io
