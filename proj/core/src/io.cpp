#include "radact/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "radact/errors.hpp"

namespace radact::io {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
T to_le(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        T out;
        auto* src = reinterpret_cast<const unsigned char*>(&v);
        auto* dst = reinterpret_cast<unsigned char*>(&out);
        for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = src[sizeof(T) - 1 - i];
        return out;
    }
    return v;
}

template <typename T>
void put(std::ofstream& f, T v) {
    const T le = to_le(v);
    f.write(reinterpret_cast<const char*>(&le), sizeof le);
}

void put_f32(std::ofstream& f, double v) {
    const auto x = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    put<std::uint32_t>(f, bits);
}

void put_f64(std::ofstream& f, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put<std::uint64_t>(f, bits);
}

template <typename T>
T get(std::ifstream& f, const std::string& path) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!f) throw IoError("truncated file: " + path);
    return to_le(v);
}

float get_f32(std::ifstream& f, const std::string& path) {
    const auto bits = get<std::uint32_t>(f, path);
    float x;
    std::memcpy(&x, &bits, 4);
    return x;
}

double get_f64(std::ifstream& f, const std::string& path) {
    const auto bits = get<std::uint64_t>(f, path);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    return f;
}

void check_magic(std::ifstream& f, const std::string& expected, const std::string& path) {
    char magic[4] = {};
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != expected)
        throw IoError("bad magic in " + path + " (expected " + expected + ")");
}

} // namespace

void write_baseband(const sigsim::ComplexBaseband& bb, const std::string& path) {
    auto f = open_out(path);
    f.write("RDCB", 4);
    put<std::uint32_t>(f, 1u);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(bb.data.rows()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(bb.data.cols()));
    for (std::size_t m = 0; m < bb.data.cols(); ++m) {
        for (std::size_t n = 0; n < bb.data.rows(); ++n) {
            put_f32(f, bb.data(n, m).real());
            put_f32(f, bb.data(n, m).imag());
        }
    }
    if (!f) throw IoError("write failed for " + path);
}

sigsim::ComplexBaseband read_baseband(const std::string& path,
                                      const sigsim::RadarConfig& cfg_template) {
    auto f = open_in(path);
    check_magic(f, "RDCB", path);
    const auto version = get<std::uint32_t>(f, path);
    if (version != 1) throw IoError("unsupported baseband version in " + path);
    const auto n = get<std::uint32_t>(f, path);
    const auto m = get<std::uint32_t>(f, path);

    sigsim::ComplexBaseband bb;
    bb.config = cfg_template;
    bb.config.samples_per_pri = n;
    bb.config.num_pri = m;
    bb.data = ComplexMatrix(n, m);
    for (std::size_t col = 0; col < m; ++col) {
        for (std::size_t row = 0; row < n; ++row) {
            const double re = get_f32(f, path);
            const double im = get_f32(f, path);
            bb.data(row, col) = {re, im};
        }
    }
    return bb;
}

void write_real_matrix(const RealMatrix& mat, const std::string& magic,
                       const std::string& path) {
    if (magic.size() != 4) throw IoError("matrix magic must be 4 characters");
    auto f = open_out(path);
    f.write(magic.data(), 4);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(mat.rows()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(mat.cols()));
    for (double v : mat) put_f32(f, v);
    if (!f) throw IoError("write failed for " + path);
}

RealMatrix read_real_matrix(const std::string& expected_magic, const std::string& path) {
    auto f = open_in(path);
    check_magic(f, expected_magic, path);
    const auto rows = get<std::uint32_t>(f, path);
    const auto cols = get<std::uint32_t>(f, path);
    RealMatrix m(rows, cols);
    for (double& v : m) v = get_f32(f, path);
    return m;
}

void write_matrix_csv(const RealMatrix& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f.precision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) f << ',';
            f << m(r, c);
        }
        f << '\n';
    }
}

void write_pca_basis(const features::PcaBasis& basis, const std::string& path) {
    auto f = open_out(path);
    f.write("PCA2", 4);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(basis.image_rows()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(basis.image_cols()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(basis.d()));
    for (double v : basis.mean_image) put_f64(f, v);
    for (double v : basis.eigenvalues) put_f64(f, v);
    for (double v : basis.eigenvectors) put_f64(f, v);
    if (!f) throw IoError("write failed for " + path);
}

features::PcaBasis read_pca_basis(const std::string& path) {
    auto f = open_in(path);
    check_magic(f, "PCA2", path);
    const auto rows = get<std::uint32_t>(f, path);
    const auto cols = get<std::uint32_t>(f, path);
    const auto d = get<std::uint32_t>(f, path);

    features::PcaBasis basis;
    basis.mean_image = RealMatrix(rows, cols);
    for (double& v : basis.mean_image) v = get_f64(f, path);
    basis.eigenvalues.resize(cols);
    for (double& v : basis.eigenvalues) v = get_f64(f, path);
    basis.eigenvectors = RealMatrix(cols, d);
    for (double& v : basis.eigenvectors) v = get_f64(f, path);
    return basis;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ',';
            f << csv_escape(row[i]);
        }
        f << '\n';
    };
    if (!table.header.empty()) write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
    if (!f) throw IoError("write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            table.header = csv_split(line);
            first = false;
        } else {
            table.rows.push_back(csv_split(line));
        }
    }
    return table;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << content;
    if (!f) throw IoError("write failed for " + path);
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace radact::io
