#include "sandpile/matrix_io.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace sandpile {

namespace {

/// Whitespace tokenizer that remembers the line of each token.
class Tokens {
public:
    explicit Tokens(std::istream& in) : in_(in) {}

    bool next(std::string& token) {
        token.clear();
        int ch;
        while ((ch = in_.get()) != EOF && std::isspace(ch)) {
            if (ch == '\n') ++line_;
        }
        if (ch == EOF) return false;
        token_line_ = line_;
        for (;;) {
            token.push_back(static_cast<char>(ch));
            ch = in_.peek();
            if (ch == EOF || std::isspace(ch)) break;
            in_.get();
        }
        return true;
    }

    [[nodiscard]] std::size_t line() const { return token_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t token_line_ = 1;
};

bool is_integer_token(const std::string& s) {
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string expect_integer(Tokens& tokens, const char* what) {
    std::string tok;
    if (!tokens.next(tok)) throw ParseError(std::string("unexpected end of input reading ") + what);
    if (!is_integer_token(tok)) {
        throw ParseError("line " + std::to_string(tokens.line()) + ": expected integer " + what +
                         ", got '" + tok + "'");
    }
    return tok;
}

std::uint64_t parse_count(Tokens& tokens, const char* what) {
    const std::string tok = expect_integer(tokens, what);
    if (tok[0] == '-') {
        throw ParseError("line " + std::to_string(tokens.line()) + ": " + what + " must be nonnegative");
    }
    try {
        return std::stoull(tok);
    } catch (const std::out_of_range&) {
        throw ParseError("line " + std::to_string(tokens.line()) + ": " + what + " out of range");
    }
}

MatrixHeader read_header(Tokens& tokens) {
    MatrixHeader h{};
    const std::uint64_t p = parse_count(tokens, "modulus p");
    if (p >= Prime::kLimit || !is_prime(p)) {
        throw ParseError("header modulus " + std::to_string(p) + " is not a prime below 65536");
    }
    h.p = static_cast<std::uint32_t>(p);
    h.rows = parse_count(tokens, "row count");
    h.cols = parse_count(tokens, "column count");
    return h;
}

std::vector<std::string> read_entries(Tokens& tokens, const MatrixHeader& h) {
    std::vector<std::string> out;
    out.reserve(h.rows * h.cols);
    for (std::size_t i = 0; i < h.rows * h.cols; ++i) out.push_back(expect_integer(tokens, "matrix entry"));
    std::string extra;
    if (tokens.next(extra)) {
        throw ParseError("line " + std::to_string(tokens.line()) + ": trailing data after " +
                         std::to_string(h.rows * h.cols) + " entries");
    }
    return out;
}

template <class F>
auto with_file(const std::string& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return f(in);
}

}  // namespace

IntMatrixFile read_int_matrix(std::istream& in) {
    Tokens tokens(in);
    const MatrixHeader h = read_header(tokens);
    const auto raw = read_entries(tokens, h);
    std::vector<BigInt> entries;
    entries.reserve(raw.size());
    for (const auto& s : raw) entries.emplace_back(s[0] == '+' ? s.substr(1) : s);
    return {h.p, IntMatrix(h.rows, h.cols, std::move(entries))};
}

GfMatrix read_gf_matrix(std::istream& in) {
    const auto file = read_int_matrix(in);
    return file.matrix.mod(Prime(file.p));
}

GfMatrix load_gf_matrix(const std::string& path) {
    return with_file(path, [](std::istream& in) { return read_gf_matrix(in); });
}

IntMatrixFile load_int_matrix(const std::string& path) {
    return with_file(path, [](std::istream& in) { return read_int_matrix(in); });
}

void write_matrix(std::ostream& out, const GfMatrix& m) {
    out << m.prime().value() << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
        out << '\n';
    }
}

void write_matrix(std::ostream& out, const IntMatrix& m, std::uint32_t p) {
    out << p << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
        out << '\n';
    }
}

}  // namespace sandpile
