#include "magres/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magres/errors.hpp"

namespace magres::io {

std::string fmt_g9(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::string fmt_exact(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw config_error("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

void write_matrix_text(const Eigen::MatrixXd& m, std::ostream& os) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            os << r << ' ' << c << ' ' << fmt_exact(m(r, c)) << '\n';
        }
    }
}

Eigen::MatrixXd read_matrix_text(std::istream& is) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
        throw io_error("matrix text: bad header");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    std::string value;
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
        if (!(is >> r >> c >> value)) throw io_error("matrix text: truncated");
        if (r < 0 || r >= rows || c < 0 || c >= cols) throw io_error("matrix text: index out of range");
        m(r, c) = parse_double(value);
    }
    return m;
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream os(p, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw io_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace magres::io
