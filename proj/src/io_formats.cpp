#include "ddtopo/io_formats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ddtopo/common.hpp"

namespace ddtopo {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_density_pgm(const DensityField& field, const std::string& path) {
    const DomainMask& m = *field.mask;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_density_pgm: cannot open " + path);
    f << "P5\n" << m.nx << " " << m.ny << "\n255\n";
    std::vector<unsigned char> row(m.nx);
    for (int y = m.ny - 1; y >= 0; --y) {  // top row first
        for (int x = 0; x < m.nx; ++x) {
            const double v = field.at_cell(x, y);
            row[x] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        f.write(reinterpret_cast<const char*>(row.data()), m.nx);
    }
    if (!f) throw std::runtime_error("write_density_pgm: write failed");

    std::ostringstream meta;
    if (m.kind == DomainMask::Kind::LBracket)
        meta << "mask lbracket\nn " << m.nx << "\ncut " << m.cut_num << " " << m.cut_den << "\n";
    else
        meta << "mask full\nnx " << m.nx << "\nny " << m.ny << "\n";
    write_text_file(path + ".meta", meta.str());
}

DensityField read_density_pgm(const std::string& path) {
    std::ifstream meta(path + ".meta");
    if (!meta) throw std::runtime_error("read_density_pgm: missing sidecar " + path + ".meta");
    std::string key, kind;
    meta >> key >> kind;
    if (key != "mask") throw std::runtime_error("read_density_pgm: malformed sidecar");
    MaskPtr mask;
    if (kind == "lbracket") {
        int n = 0, num = 0, den = 0;
        meta >> key >> n;
        if (key != "n") throw std::runtime_error("read_density_pgm: malformed sidecar");
        meta >> key >> num >> den;
        if (key != "cut") throw std::runtime_error("read_density_pgm: malformed sidecar");
        mask = lbracket_mask(n, num, den);
    } else if (kind == "full") {
        int nx = 0, ny = 0;
        meta >> key >> nx;
        if (key != "nx") throw std::runtime_error("read_density_pgm: malformed sidecar");
        meta >> key >> ny;
        if (key != "ny") throw std::runtime_error("read_density_pgm: malformed sidecar");
        mask = full_mask(nx, ny);
    } else {
        throw std::runtime_error("read_density_pgm: unknown mask kind '" + kind + "'");
    }

    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_density_pgm: cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    f >> magic >> w >> h >> maxval;
    if (magic != "P5" || maxval != 255)
        throw std::runtime_error("read_density_pgm: expected binary P5 with maxval 255");
    if (w != mask->nx || h != mask->ny)
        throw std::runtime_error("read_density_pgm: image size does not match sidecar mask");
    f.get();  // single whitespace after the header
    std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h);
    f.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!f) throw std::runtime_error("read_density_pgm: truncated pixel data");

    std::vector<double> values(mask->active_count());
    for (int k = 0; k < mask->active_count(); ++k) {
        const int c = mask->active_cells[k];
        const int x = c % w, y = c / w;
        values[k] = pixels[static_cast<std::size_t>(h - 1 - y) * w + x] / 255.0;
    }
    return DensityField(mask, std::move(values));
}

void write_diagram_csv(const PersistenceDiagram& d, const std::string& path) {
    std::ostringstream out;
    out << "birth,death\n";
    auto pairs = d.pairs;
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [b, dd] : pairs) out << g17(b) << "," << g17(dd) << "\n";
    write_text_file(path, out.str());
}

PersistenceDiagram read_diagram_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_diagram_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || trim(line) != "birth,death")
        throw std::runtime_error("read_diagram_csv: expected 'birth,death' header in " + path);
    PersistenceDiagram d;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_diagram_csv: malformed line '" + line + "'");
        d.pairs.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    std::sort(d.pairs.begin(), d.pairs.end());
    return d;
}

void write_matrix_csv(const DistanceMatrix& a, const std::string& path) {
    std::ostringstream out;
    for (int i = 0; i < a.n; ++i) {
        for (int j = 0; j < a.n; ++j) {
            if (j) out << ",";
            out << g17(a.at(i, j));
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

void write_front_csv(const std::vector<Candidate>& members, const std::string& path) {
    std::vector<const Candidate*> order;
    order.reserve(members.size());
    for (const Candidate& c : members) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const Candidate* a, const Candidate* b) {
        if (a->rank != b->rank) return a->rank < b->rank;
        if (a->objectives[0] != b->objectives[0]) return a->objectives[0] < b->objectives[0];
        if (a->objectives[1] != b->objectives[1]) return a->objectives[1] < b->objectives[1];
        return a->id < b->id;
    });
    std::ostringstream out;
    out << "F1,F2,rank,candidate_id\n";
    for (const Candidate* c : order)
        out << g17(c->objectives[0]) << "," << g17(c->objectives[1]) << "," << c->rank << ","
            << c->id << "\n";
    write_text_file(path, out.str());
}

std::vector<std::array<double, 2>> read_objectives_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_objectives_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("read_objectives_csv: empty file");
    std::vector<std::array<double, 2>> pts;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw std::runtime_error("read_objectives_csv: malformed line '" + line + "'");
        pts.push_back({std::stod(a), std::stod(b)});
    }
    return pts;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate key " + key);
        kv[key] = value;
    }
    return kv;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace ddtopo
