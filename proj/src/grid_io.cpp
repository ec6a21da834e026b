#include "tracelab/grid_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "tracelab/error.hpp"

namespace tracelab {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void write_header(std::ostream& os, const BoundaryGrid& g, const std::vector<double>* levels) {
    os << "# " << g.ambient_dim() << ',' << g.dim() << ',' << format_double(g.extent()) << ','
       << format_double(g.spacing());
    if (levels)
        for (double x : *levels) os << ',' << format_double(x);
    os << '\n';
}

void write_coords(std::ostream& os, const BoundaryGrid& g, std::size_t i) {
    const auto x = g.point(i);
    os << format_double(x[0]);
    if (g.dim() == 2) os << ',' << format_double(x[1]);
}

std::vector<double> split_numbers(const std::string& text, std::size_t line_no) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        std::size_t a = pos, b = end;
        while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
        if (a == b) throw ParseError("empty field", line_no);
        const std::string field = text.substr(a, b - a);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + field + "'", line_no);
        }
        if (used != field.size()) throw ParseError("not a number: '" + field + "'", line_no);
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

struct Parsed {
    BoundaryGrid grid;
    std::vector<double> levels;
    std::vector<std::vector<double>> rows;
};

Parsed parse(std::istream& is, bool expect_levels) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ParseError("missing header", 1);
    ++line_no;
    if (line.size() < 2 || line[0] != '#') throw ParseError("header must start with '#'", line_no);
    const auto head = split_numbers(line.substr(1), line_no);
    if (head.size() < 4) throw ParseError("header needs n,dim,L,h", line_no);
    const int n = static_cast<int>(head[0]);
    const int dim = static_cast<int>(head[1]);
    if (n != dim + 1 || head[0] != n || head[1] != dim) throw ParseError("header has inconsistent n and dim", line_no);
    std::optional<BoundaryGrid> grid;
    try {
        grid.emplace(dim, head[2], head[3]);
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad grid in header: ") + e.what(), line_no);
    }
    std::vector<double> levels(head.begin() + 4, head.end());
    if (expect_levels) {
        try {
            validate_levels(levels);
        } catch (const std::exception& e) {
            throw ParseError(std::string("bad levels in header: ") + e.what(), line_no);
        }
    } else if (!levels.empty()) {
        throw ParseError("boundary data header must not list levels", line_no);
    }
    const std::size_t width = static_cast<std::size_t>(dim) + (expect_levels ? levels.size() : 1);

    Parsed out{*grid, std::move(levels), {}};
    out.rows.reserve(grid->node_count());
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (out.rows.size() == grid->node_count()) throw ParseError("more rows than grid nodes", line_no);
        auto row = split_numbers(line, line_no);
        if (row.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, got " + std::to_string(row.size()), line_no);
        const auto x = grid->point(out.rows.size());
        for (int d = 0; d < dim; ++d)
            if (std::fabs(row[d] - x[d]) > 1e-9 * std::max(1.0, grid->extent()))
                throw ParseError("node coordinate does not match the grid", line_no);
        for (std::size_t c = dim; c < row.size(); ++c)
            if (!std::isfinite(row[c])) throw ParseError("non-finite value", line_no);
        out.rows.push_back(std::move(row));
    }
    if (out.rows.size() != grid->node_count())
        throw ParseError("expected " + std::to_string(grid->node_count()) + " rows, got " +
                             std::to_string(out.rows.size()),
                         line_no + 1);
    return out;
}

}  // namespace

void write_csv(std::ostream& os, const BoundaryGridFunction& f) {
    write_header(os, f.grid, nullptr);
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
        write_coords(os, f.grid, i);
        os << ',' << format_double(f.values[i]) << '\n';
    }
}

void write_csv(std::ostream& os, const HalfSpaceField& u) {
    write_header(os, u.grid(), &u.levels());
    for (std::size_t i = 0; i < u.grid().node_count(); ++i) {
        write_coords(os, u.grid(), i);
        for (std::size_t k = 0; k < u.level_count(); ++k) os << ',' << format_double(u.at(i, k));
        os << '\n';
    }
}

BoundaryGridFunction read_boundary_csv(std::istream& is) {
    auto p = parse(is, false);
    BoundaryGridFunction f(p.grid);
    const auto dim = static_cast<std::size_t>(p.grid.dim());
    for (std::size_t i = 0; i < p.rows.size(); ++i) f.values[i] = p.rows[i][dim];
    return f;
}

HalfSpaceField read_field_csv(std::istream& is) {
    auto p = parse(is, true);
    HalfSpaceField u(p.grid, p.levels);
    const auto dim = static_cast<std::size_t>(p.grid.dim());
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        for (std::size_t k = 0; k < p.levels.size(); ++k) u.at(i, k) = p.rows[i][dim + k];
    return u;
}

BoundaryGridFunction load_boundary_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    return read_boundary_csv(in);
}

void save_boundary_data(const std::string& path, const BoundaryGridFunction& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, f);
}

}  // namespace tracelab
