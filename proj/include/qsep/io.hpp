#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "qsep/bruhat.hpp"
#include "qsep/hss.hpp"
#include "qsep/sss.hpp"

namespace qsep {

// Dense text format: line 1 "m n p", then m lines of n decimal residues
// separated by single spaces, newline-terminated, no trailing spaces.
void write_dense(std::ostream& os, const DenseMatrix& a);
DenseMatrix read_dense(std::istream& is);

// Sparse text format: line 1 "m n p nnz", then nnz lines "i j v" with
// 1-based indices, sorted by (i, j).
void write_sparse(std::ostream& os, const SparseMatrix& a);
SparseMatrix read_sparse(std::istream& is);

using Generator = std::variant<SSSGenerator, HSSGenerator, BruhatGenerator>;

// Generator formats (see README for the full block order):
//   SSS n t p N / HSS n t p K / BRU n u v p t headers followed by the
//   blocks, each as "rows cols" plus row-major residues; permutations as
//   1-based index lines.
void write_generator(std::ostream& os, const SSSGenerator& g);
void write_generator(std::ostream& os, const HSSGenerator& g);
void write_generator(std::ostream& os, const BruhatGenerator& g);
void write_generator(std::ostream& os, const Generator& g);
Generator read_generator(std::istream& is);

// File helpers; throw ParseError on unreadable or malformed content.
enum class MatrixFileKind { Dense, Sparse };
MatrixFileKind probe_matrix_file(const std::string& path);
DenseMatrix read_dense_file(const std::string& path);
SparseMatrix read_sparse_file(const std::string& path);
Generator read_generator_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string dense_to_string(const DenseMatrix& a);
std::string sparse_to_string(const SparseMatrix& a);
std::string generator_to_string(const Generator& g);

}  // namespace qsep
