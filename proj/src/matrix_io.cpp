#include "mpmat/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mpmat {

namespace {

const char* kMagic = "MPMAT";
const char* kVersion = "v1";

void write_header(std::ostream& os, const char* tag, std::size_t m, std::size_t n) {
    os << kMagic << ' ' << kVersion << ' ' << tag << ' ' << m << ' ' << n << '\n';
}

std::string hex_literal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

template <typename E>
void write_body(std::ostream& os, const DenseMatrix<E>& a) {
    write_header(os, precision_tag<E>::value, a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) os << ' ';
            if constexpr (std::is_same_v<E, double>)
                os << hex_literal(a(i, j));
            else
                os << a(i, j).to_hex_string();
        }
        os << '\n';
    }
    if (!os) throw io_error("write_matrix: stream failure");
}

template <typename E>
void write_file(const std::string& path, const DenseMatrix<E>& a) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_body(os, a);
}

template <typename E>
E parse_element(std::istream& is) {
    if constexpr (std::is_same_v<E, double>) {
        std::string tok;
        if (!(is >> tok)) throw io_error("read_matrix: truncated row");
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw io_error("read_matrix: bad element: " + tok);
        return v;
    } else {
        std::string joined;
        for (int k = 0; k < E::components; ++k) {
            std::string tok;
            if (!(is >> tok)) throw io_error("read_matrix: truncated row");
            if (k) joined += ' ';
            joined += tok;
        }
        auto v = E::from_hex_string(joined);
        if (!v) throw io_error("read_matrix: bad element: " + joined);
        return *v;
    }
}

} // namespace

void write_matrix(std::ostream& os, const DenseMatrix<double>& a) { write_body(os, a); }
void write_matrix(std::ostream& os, const DenseMatrix<MultiFloat<2>>& a) { write_body(os, a); }
void write_matrix(std::ostream& os, const DenseMatrix<MultiFloat<3>>& a) { write_body(os, a); }
void write_matrix(std::ostream& os, const DenseMatrix<MultiFloat<4>>& a) { write_body(os, a); }

void write_matrix_file(const std::string& path, const DenseMatrix<double>& a) {
    write_file(path, a);
}
void write_matrix_file(const std::string& path, const DenseMatrix<MultiFloat<2>>& a) {
    write_file(path, a);
}
void write_matrix_file(const std::string& path, const DenseMatrix<MultiFloat<3>>& a) {
    write_file(path, a);
}
void write_matrix_file(const std::string& path, const DenseMatrix<MultiFloat<4>>& a) {
    write_file(path, a);
}

template <typename E>
DenseMatrix<E> read_matrix(std::istream& is) {
    std::string magic, version, tag;
    std::size_t m = 0, n = 0;
    if (!(is >> magic >> version >> tag >> m >> n)) throw io_error("read_matrix: bad header");
    if (magic != kMagic || version != kVersion)
        throw io_error("read_matrix: not an MPMAT v1 file");
    if (tag != precision_tag<E>::value)
        throw io_error("read_matrix: precision tag mismatch: expected " +
                       std::string(precision_tag<E>::value) + ", got " + tag);
    if (m == 0 || n == 0) throw io_error("read_matrix: bad dimensions");
    DenseMatrix<E> a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = parse_element<E>(is);
    return a;
}

template <typename E>
DenseMatrix<E> read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    return read_matrix<E>(is);
}

template DenseMatrix<double> read_matrix<double>(std::istream&);
template DenseMatrix<MultiFloat<2>> read_matrix<MultiFloat<2>>(std::istream&);
template DenseMatrix<MultiFloat<3>> read_matrix<MultiFloat<3>>(std::istream&);
template DenseMatrix<MultiFloat<4>> read_matrix<MultiFloat<4>>(std::istream&);
template DenseMatrix<double> read_matrix_file<double>(const std::string&);
template DenseMatrix<MultiFloat<2>> read_matrix_file<MultiFloat<2>>(const std::string&);
template DenseMatrix<MultiFloat<3>> read_matrix_file<MultiFloat<3>>(const std::string&);
template DenseMatrix<MultiFloat<4>> read_matrix_file<MultiFloat<4>>(const std::string&);

} // namespace mpmat
