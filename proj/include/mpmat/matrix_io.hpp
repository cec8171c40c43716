#pragma once
#include "dense_matrix.hpp"
#include "multifloat.hpp"

#include <iosfwd>
#include <string>

// MPMAT v1 text format. Header line:
//
//   MPMAT v1 <precision-tag> <m> <n>
//
// with precision tags d, dd, td, qd. One matrix row per line, elements as
// space-separated hexadecimal floating-point literals (K literals per
// element for the multi-component tags). Round-trips are bit-exact.

namespace mpmat {

template <typename E>
struct precision_tag;

template <>
struct precision_tag<double> {
    static constexpr const char* value = "d";
};
template <>
struct precision_tag<MultiFloat<2>> {
    static constexpr const char* value = "dd";
};
template <>
struct precision_tag<MultiFloat<3>> {
    static constexpr const char* value = "td";
};
template <>
struct precision_tag<MultiFloat<4>> {
    static constexpr const char* value = "qd";
};

void write_matrix(std::ostream& os, const DenseMatrix<double>& a);
void write_matrix(std::ostream& os, const DenseMatrix<MultiFloat<2>>& a);
void write_matrix(std::ostream& os, const DenseMatrix<MultiFloat<3>>& a);
void write_matrix(std::ostream& os, const DenseMatrix<MultiFloat<4>>& a);

void write_matrix_file(const std::string& path, const DenseMatrix<double>& a);
void write_matrix_file(const std::string& path, const DenseMatrix<MultiFloat<2>>& a);
void write_matrix_file(const std::string& path, const DenseMatrix<MultiFloat<3>>& a);
void write_matrix_file(const std::string& path, const DenseMatrix<MultiFloat<4>>& a);

template <typename E>
DenseMatrix<E> read_matrix(std::istream& is);

template <typename E>
DenseMatrix<E> read_matrix_file(const std::string& path);

extern template DenseMatrix<double> read_matrix<double>(std::istream&);
extern template DenseMatrix<MultiFloat<2>> read_matrix<MultiFloat<2>>(std::istream&);
extern template DenseMatrix<MultiFloat<3>> read_matrix<MultiFloat<3>>(std::istream&);
extern template DenseMatrix<MultiFloat<4>> read_matrix<MultiFloat<4>>(std::istream&);
extern template DenseMatrix<double> read_matrix_file<double>(const std::string&);
extern template DenseMatrix<MultiFloat<2>> read_matrix_file<MultiFloat<2>>(const std::string&);
extern template DenseMatrix<MultiFloat<3>> read_matrix_file<MultiFloat<3>>(const std::string&);
extern template DenseMatrix<MultiFloat<4>> read_matrix_file<MultiFloat<4>>(const std::string&);

} // namespace mpmat
