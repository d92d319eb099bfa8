#include "cmmc/pattern_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace cmmc {

namespace {

std::string strip(const std::string& line) {
    std::string s = line;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& tok) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno != 0) return std::nullopt;
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

PointPattern read_pattern(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw PatternIoError(PatternIoError::Kind::io_failure,
                             "cannot open pattern file: " + path);

    std::string line;
    std::optional<Window> window;
    std::vector<PointXY> points;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip(line);
        if (body.empty()) continue;

        std::istringstream ss(body);
        if (!window) {
            std::string tag;
            ss >> tag;
            std::string xs[4];
            for (auto& t : xs) ss >> t;
            std::string extra;
            if (tag != "window" || xs[3].empty() || (ss >> extra))
                throw PatternIoError(PatternIoError::Kind::malformed_header,
                                     path + ": malformed header at line " + std::to_string(lineno));
            double v[4];
            for (int i = 0; i < 4; ++i) {
                const auto num = parse_number(xs[i]);
                if (!num)
                    throw PatternIoError(PatternIoError::Kind::malformed_header,
                                         path + ": non-numeric window bound at line " +
                                             std::to_string(lineno));
                v[i] = *num;
            }
            if (!(v[0] < v[1]) || !(v[2] < v[3]))
                throw PatternIoError(PatternIoError::Kind::malformed_header,
                                     path + ": degenerate window at line " + std::to_string(lineno));
            window = Window(v[0], v[1], v[2], v[3]);
            continue;
        }

        std::string xs, ys, extra;
        ss >> xs >> ys;
        if (ys.empty() || (ss >> extra))
            throw PatternIoError(PatternIoError::Kind::bad_coordinate,
                                 path + ": expected `x y` at line " + std::to_string(lineno));
        const auto x = parse_number(xs);
        const auto y = parse_number(ys);
        if (!x || !y)
            throw PatternIoError(PatternIoError::Kind::bad_coordinate,
                                 path + ": non-numeric coordinate at line " + std::to_string(lineno));
        if (!window->contains(*x, *y))
            throw PatternIoError(PatternIoError::Kind::out_of_window,
                                 path + ": point outside window at line " + std::to_string(lineno));
        points.push_back({*x, *y});
    }
    if (!window)
        throw PatternIoError(PatternIoError::Kind::malformed_header,
                             path + ": missing window header");
    return PointPattern(*window, std::move(points));
}

void write_pattern(const PointPattern& pattern, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw PatternIoError(PatternIoError::Kind::io_failure,
                             "cannot open file for writing: " + path);
    const Window& w = pattern.window();
    out << "window " << format_double(w.x_min) << ' ' << format_double(w.x_max) << ' '
        << format_double(w.y_min) << ' ' << format_double(w.y_max) << '\n';
    for (const auto& p : pattern.points())
        out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    if (!out)
        throw PatternIoError(PatternIoError::Kind::io_failure, "write failed: " + path);
}

} // namespace cmmc
