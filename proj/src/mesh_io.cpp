#include "dasm/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace dasm {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

// Leading integer of an OBJ face token such as "7", "7/2" or "7//3".
bool parse_obj_index(const std::string& token, long& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const char* slash = std::find(begin, end, '/');
    auto [ptr, ec] = std::from_chars(begin, slash, out);
    return ec == std::errc() && ptr == slash && slash != begin;
}

void emit_warnings(const std::map<std::string, std::size_t>& skipped, const std::filesystem::path& path,
                   std::vector<std::string>* warnings) {
    for (const auto& [directive, count] : skipped) {
        std::string msg = path.string() + ": ignored " + std::to_string(count) + " '" + directive + "' line" +
                          (count == 1 ? "" : "s");
        if (warnings) {
            warnings->push_back(std::move(msg));
        } else {
            std::cerr << "warning: " << msg << '\n';
        }
    }
}

TriangleMesh load_obj(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in = open_in(path);
    TriangleMesh mesh;
    std::map<std::string, std::size_t> skipped;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Vec3 p{};
            if (!(ss >> p[0] >> p[1] >> p[2])) parse_fail(path, lineno, "malformed vertex line");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<long> idx;
            std::string token;
            while (ss >> token) {
                long value = 0;
                if (!parse_obj_index(token, value) || value == 0) {
                    parse_fail(path, lineno, "malformed face index '" + token + "'");
                }
                // Negative indices are relative to the vertices read so far.
                if (value < 0) value += static_cast<long>(mesh.vertices.size()) + 1;
                idx.push_back(value - 1);
            }
            if (idx.size() != 3) {
                parse_fail(path, lineno, "only triangular faces are supported (got " + std::to_string(idx.size()) + ")");
            }
            mesh.faces.push_back({static_cast<VertexId>(idx[0]), static_cast<VertexId>(idx[1]),
                                  static_cast<VertexId>(idx[2])});
        } else {
            ++skipped[tag];
        }
    }
    emit_warnings(skipped, path, warnings);
    return mesh;
}

// Next non-empty, non-comment line split into tokens.
bool next_tokens(std::istream& in, std::size_t& lineno, std::istringstream& ss) {
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ss.clear();
        ss.str(line);
        return true;
    }
    return false;
}

TriangleMesh load_off(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::size_t lineno = 0;
    std::istringstream ss;
    if (!next_tokens(in, lineno, ss)) parse_fail(path, lineno, "empty file");
    std::string header;
    ss >> header;
    if (header != "OFF") parse_fail(path, lineno, "missing OFF header");
    long nv = 0;
    long nf = 0;
    long ne = 0;
    // Counts may share the header line.
    if (!(ss >> nv)) {
        if (!next_tokens(in, lineno, ss) || !(ss >> nv)) parse_fail(path, lineno, "missing counts line");
    }
    if (!(ss >> nf)) parse_fail(path, lineno, "malformed counts line");
    ss >> ne;
    if (nv < 0 || nf < 0) parse_fail(path, lineno, "negative element counts");

    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        Vec3 p{};
        if (!next_tokens(in, lineno, ss) || !(ss >> p[0] >> p[1] >> p[2])) {
            parse_fail(path, lineno, "malformed vertex line");
        }
        mesh.vertices.push_back(p);
    }
    mesh.faces.reserve(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        long arity = 0;
        long a = 0;
        long b = 0;
        long c = 0;
        if (!next_tokens(in, lineno, ss) || !(ss >> arity)) parse_fail(path, lineno, "malformed face line");
        if (arity != 3) parse_fail(path, lineno, "only triangular faces are supported");
        if (!(ss >> a >> b >> c)) parse_fail(path, lineno, "malformed face line");
        mesh.faces.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b), static_cast<VertexId>(c)});
    }
    return mesh;
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".obj") return MeshFormat::obj;
    if (ext == ".off") return MeshFormat::off;
    throw std::invalid_argument("unrecognised mesh extension '" + ext + "' (expected .obj or .off)");
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format, std::vector<std::string>* warnings) {
    TriangleMesh mesh = format == MeshFormat::obj ? load_obj(path, warnings) : load_off(path);
    validate(mesh);
    return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    return load_mesh(path, format_from_path(path), warnings);
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
    validate(mesh);
    std::ofstream out = open_out(path);
    char buf[128];
    if (format == MeshFormat::off) {
        out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    }
    for (const Vec3& p : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%s%.17g %.17g %.17g\n", format == MeshFormat::obj ? "v " : "", p[0], p[1], p[2]);
        out << buf;
    }
    for (const Face& f : mesh.faces) {
        if (format == MeshFormat::obj) {
            out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
        } else {
            out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
        }
    }
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
    save_mesh(mesh, path, format_from_path(path));
}

TargetCloud load_xyz(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    TargetCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    int columns = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<double> values;
        double x = 0.0;
        while (ss >> x) values.push_back(x);
        if (!ss.eof()) parse_fail(path, lineno, "non-numeric token");
        if (values.empty()) continue;
        const int n = static_cast<int>(values.size());
        if (n != 3 && n != 6) parse_fail(path, lineno, "expected 3 or 6 columns, got " + std::to_string(n));
        if (columns >= 0 && n != columns) parse_fail(path, lineno, "column count changed mid-file");
        columns = n;
        cloud.points.push_back({values[0], values[1], values[2]});
        if (n == 6) {
            const Vec3 nrm{values[3], values[4], values[5]};
            const double len = norm(nrm);
            if (!(len > 0.0)) parse_fail(path, lineno, "zero-length normal");
            cloud.normals.push_back((1.0 / len) * nrm);
        }
    }
    return cloud;
}

void save_xyz(const TargetCloud& cloud, const std::filesystem::path& path) {
    if (cloud.has_normals() && cloud.normals.size() != cloud.points.size()) {
        throw std::invalid_argument("normal count does not match point count");
    }
    std::ofstream out = open_out(path);
    char buf[256];
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Vec3& p = cloud.points[i];
        if (cloud.has_normals()) {
            const Vec3& n = cloud.normals[i];
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g\n", p[0], p[1], p[2], n[0], n[1], n[2]);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
        }
        out << buf;
    }
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace dasm
