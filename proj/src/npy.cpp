#include "polyunmix/npy.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polyunmix::npy {

namespace {

const char kMagic[7] = "\x93NUMPY";

std::string make_header(const std::string& descr, const std::vector<std::size_t>& shape)
{
    std::ostringstream dict;
    dict << "{'descr': '" << descr << "', 'fortran_order': False, 'shape': (";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        dict << shape[i];
        if (shape.size() == 1 || i + 1 < shape.size()) dict << ",";
        if (i + 1 < shape.size()) dict << " ";
    }
    dict << "), }";
    std::string d = dict.str();
    // total header (magic 6 + version 2 + len 2 + dict) padded to 64 bytes
    const std::size_t base = 10 + d.size() + 1; // +1 for trailing newline
    const std::size_t padded = (base + 63) / 64 * 64;
    d.append(padded - base, ' ');
    d.push_back('\n');
    return d;
}

void write_file(const std::string& path, const std::string& descr,
                const std::vector<std::size_t>& shape, const void* data, std::size_t bytes)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("npy: cannot open for writing: " + path);
    const std::string header = make_header(descr, shape);
    f.write(kMagic, 6);
    const unsigned char version[2] = {1, 0};
    f.write(reinterpret_cast<const char*>(version), 2);
    const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
    const unsigned char lenb[2] = {static_cast<unsigned char>(hlen & 0xff),
                                   static_cast<unsigned char>(hlen >> 8)};
    f.write(reinterpret_cast<const char*>(lenb), 2);
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!f) throw std::runtime_error("npy: write failed: " + path);
}

struct ParsedHeader {
    std::string descr;
    bool fortran = false;
    std::vector<std::size_t> shape;
};

ParsedHeader parse_header(const std::string& dict, const std::string& path)
{
    ParsedHeader h;
    auto find_value = [&](const std::string& key) -> std::string {
        const auto kpos = dict.find("'" + key + "'");
        if (kpos == std::string::npos)
            throw std::runtime_error("npy: malformed header (missing " + key + "): " + path);
        auto pos = dict.find(':', kpos);
        if (pos == std::string::npos) throw std::runtime_error("npy: malformed header: " + path);
        ++pos;
        while (pos < dict.size() && dict[pos] == ' ') ++pos;
        return dict.substr(pos);
    };

    std::string descr = find_value("descr");
    if (descr.empty() || descr[0] != '\'')
        throw std::runtime_error("npy: malformed descr: " + path);
    h.descr = descr.substr(1, descr.find('\'', 1) - 1);

    h.fortran = find_value("fortran_order").rfind("True", 0) == 0;

    std::string shape = find_value("shape");
    if (shape.empty() || shape[0] != '(')
        throw std::runtime_error("npy: malformed shape: " + path);
    const auto close = shape.find(')');
    if (close == std::string::npos) throw std::runtime_error("npy: malformed shape: " + path);
    std::string inner = shape.substr(1, close - 1);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::string t;
        for (char c : tok)
            if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
        if (t.empty()) continue;
        h.shape.push_back(static_cast<std::size_t>(std::stoull(t)));
    }
    return h;
}

std::vector<char> read_payload(const std::string& path, ParsedHeader& h)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("npy: cannot open: " + path);
    char magic[6];
    f.read(magic, 6);
    if (!f || std::memcmp(magic, kMagic, 6) != 0)
        throw std::runtime_error("npy: bad magic: " + path);
    unsigned char version[2];
    f.read(reinterpret_cast<char*>(version), 2);
    std::size_t hlen = 0;
    if (version[0] == 1) {
        unsigned char b[2];
        f.read(reinterpret_cast<char*>(b), 2);
        hlen = static_cast<std::size_t>(b[0]) | (static_cast<std::size_t>(b[1]) << 8);
    } else if (version[0] == 2 || version[0] == 3) {
        unsigned char b[4];
        f.read(reinterpret_cast<char*>(b), 4);
        hlen = static_cast<std::size_t>(b[0]) | (static_cast<std::size_t>(b[1]) << 8) |
               (static_cast<std::size_t>(b[2]) << 16) | (static_cast<std::size_t>(b[3]) << 24);
    } else {
        throw std::runtime_error("npy: unsupported version: " + path);
    }
    std::string dict(hlen, '\0');
    f.read(dict.data(), static_cast<std::streamsize>(hlen));
    if (!f) throw std::runtime_error("npy: truncated header: " + path);
    h = parse_header(dict, path);

    std::size_t count = 1;
    for (std::size_t s : h.shape) count *= s;
    std::vector<char> payload(count * 8);
    f.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!f) throw std::runtime_error("npy: truncated payload: " + path);
    return payload;
}

} // namespace

void save_matrix(const std::string& path, const Eigen::MatrixXd& m)
{
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor rm = m;
    write_file(path, "<f8",
               {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
               rm.data(), static_cast<std::size_t>(m.size()) * 8);
}

void save_vector(const std::string& path, const Eigen::VectorXd& v)
{
    write_file(path, "<f8", {static_cast<std::size_t>(v.size())}, v.data(),
               static_cast<std::size_t>(v.size()) * 8);
}

void save_int_vector(const std::string& path, const std::vector<std::int64_t>& v)
{
    write_file(path, "<i8", {v.size()}, v.data(), v.size() * 8);
}

Eigen::MatrixXd load_matrix(const std::string& path, std::vector<std::size_t>* shape_out)
{
    ParsedHeader h;
    const std::vector<char> payload = read_payload(path, h);
    if (h.descr != "<f8")
        throw std::runtime_error("npy: expected '<f8' data in " + path + ", got '" + h.descr + "'");
    if (h.shape.empty() || h.shape.size() > 2)
        throw std::runtime_error("npy: expected rank 1 or 2 array: " + path);
    const std::size_t rows = h.shape[0];
    const std::size_t cols = h.shape.size() == 2 ? h.shape[1] : 1;
    if (shape_out) *shape_out = h.shape;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double* p = reinterpret_cast<const double*>(payload.data());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t idx = h.fortran ? c * rows + r : r * cols + c;
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = p[idx];
        }
    return m;
}

std::vector<std::int64_t> load_int_vector(const std::string& path)
{
    ParsedHeader h;
    const std::vector<char> payload = read_payload(path, h);
    if (h.descr != "<i8")
        throw std::runtime_error("npy: expected '<i8' data in " + path + ", got '" + h.descr + "'");
    std::size_t count = 1;
    for (std::size_t s : h.shape) count *= s;
    std::vector<std::int64_t> v(count);
    std::memcpy(v.data(), payload.data(), count * 8);
    return v;
}

} // namespace polyunmix::npy
