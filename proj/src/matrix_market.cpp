#include "kronlap/matrix_market.hpp"

#include "kronlap/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace kronlap {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool blank(std::string_view line)
{
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

// Splits text into lines, tracking 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line)
    {
        if (pos_ >= text_.size())
            return false;
        const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
        line = text_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos_ = end + 1;
        ++number_;
        return true;
    }

    // Next line that is neither blank nor a comment.
    bool next_data(std::string_view& line)
    {
        while (next(line)) {
            if (!blank(line) && line.front() != '%')
                return true;
        }
        return false;
    }

    std::size_t number() const noexcept { return number_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t number_ = 0;
};

double parse_value(std::istringstream& is, const std::string& origin, std::size_t line)
{
    std::string token;
    if (!(is >> token))
        throw ParseError(origin, line, "missing value");
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(token, &used);
        if (used != token.size())
            throw std::invalid_argument(token);
    } catch (const std::out_of_range&) {
        throw ParseError(origin, line, "value out of range: " + token);
    } catch (const std::invalid_argument&) {
        throw ParseError(origin, line, "cannot parse value '" + token + "'");
    }
    if (!std::isfinite(v))
        throw ParseError(origin, line, "non-finite value " + token);
    return v;
}

long long parse_index(std::istringstream& is, const std::string& origin, std::size_t line, const char* what)
{
    long long v = 0;
    if (!(is >> v))
        throw ParseError(origin, line, std::string("cannot parse ") + what);
    return v;
}

void expect_end(std::istringstream& is, const std::string& origin, std::size_t line)
{
    std::string rest;
    if (is >> rest)
        throw ParseError(origin, line, "unexpected trailing token '" + rest + "'");
}

} // namespace

DenseMatrix parse_matrix_market(std::string_view text, const std::string& origin)
{
    LineReader reader(text);
    std::string_view line;
    if (!reader.next(line))
        throw ParseError(origin, 1, "empty file");

    std::istringstream header{std::string(line)};
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw ParseError(origin, reader.number(), "missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix")
        throw ParseError(origin, reader.number(), "unsupported object '" + object + "'");
    if (format != "array" && format != "coordinate")
        throw ParseError(origin, reader.number(), "unsupported format '" + format + "'");
    if (field != "real" && field != "integer" && field != "double")
        throw ParseError(origin, reader.number(), "unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError(origin, reader.number(), "unsupported symmetry '" + symmetry + "'");
    const bool symmetric = symmetry == "symmetric";
    const bool coordinate = format == "coordinate";

    if (!reader.next_data(line))
        throw ParseError(origin, reader.number() + 1, "missing size line");
    std::istringstream size_line{std::string(line)};
    const long long rows = parse_index(size_line, origin, reader.number(), "row count");
    const long long cols = parse_index(size_line, origin, reader.number(), "column count");
    const long long entries = coordinate ? parse_index(size_line, origin, reader.number(), "entry count") : 0;
    expect_end(size_line, origin, reader.number());
    if (rows <= 0 || cols <= 0)
        throw ParseError(origin, reader.number(), "matrix dimensions must be positive");
    if (symmetric && rows != cols)
        throw ParseError(origin, reader.number(), "symmetric matrix must be square");
    if (entries < 0)
        throw ParseError(origin, reader.number(), "negative entry count");

    DenseMatrix m = DenseMatrix::Zero(rows, cols);
    if (coordinate) {
        for (long long e = 0; e < entries; ++e) {
            if (!reader.next_data(line))
                throw ParseError(origin, reader.number() + 1,
                                 "expected " + std::to_string(entries) + " entries, found " + std::to_string(e));
            std::istringstream is{std::string(line)};
            const long long i = parse_index(is, origin, reader.number(), "row index");
            const long long j = parse_index(is, origin, reader.number(), "column index");
            const double v = parse_value(is, origin, reader.number());
            expect_end(is, origin, reader.number());
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw ParseError(origin, reader.number(),
                                 "index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
            m(i - 1, j - 1) += v;
            if (symmetric && i != j)
                m(j - 1, i - 1) += v;
        }
    } else {
        // Column-major; symmetric files list the lower triangle only.
        for (long long j = 0; j < cols; ++j)
            for (long long i = symmetric ? j : 0; i < rows; ++i) {
                if (!reader.next_data(line))
                    throw ParseError(origin, reader.number() + 1, "array data ends early");
                std::istringstream is{std::string(line)};
                const double v = parse_value(is, origin, reader.number());
                expect_end(is, origin, reader.number());
                m(i, j) = v;
                if (symmetric)
                    m(j, i) = v;
            }
    }
    if (reader.next_data(line))
        throw ParseError(origin, reader.number(), "more entries than declared");
    return m;
}

DenseMatrix read_matrix_market(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("failed reading " + path.string());
    return parse_matrix_market(buf.str(), path.string());
}

Vector read_vector_market(const std::filesystem::path& path)
{
    DenseMatrix m = read_matrix_market(path);
    if (m.cols() == 1)
        return m.col(0);
    if (m.rows() == 1)
        return m.row(0).transpose();
    throw ValidationError(path.string() + " holds a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols())
                          + " matrix, expected a vector");
}

std::string format_matrix_market(const DenseMatrix& m, MatrixMarketLayout layout)
{
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    if (layout == MatrixMarketLayout::array) {
        os << "%%MatrixMarket matrix array real general\n";
        os << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                os << m(i, j) << '\n';
        return os.str();
    }
    const auto nnz = (m.array() != 0.0).count();
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0)
                os << i + 1 << ' ' << j + 1 << ' ' << m(i, j) << '\n';
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(parent, ec))
        throw IoError("directory " + parent.string() + " does not exist");
    std::random_device rd;
    const fs::path tmp = parent / (path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoError("failed writing " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& m, MatrixMarketLayout layout)
{
    require_finite(m, "matrix to write");
    write_file_atomic(path, format_matrix_market(m, layout));
}

void write_vector_market(const std::filesystem::path& path, const Vector& v)
{
    write_matrix_market(path, DenseMatrix(v));
}

} // namespace kronlap
