#include "tileforge/io.hpp"

#include <set>
#include <tuple>

namespace tileforge {

namespace {

int required_int(const nlohmann::json& obj, const char* key, std::size_t tile) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer())
    throw Error(ErrorCode::MalformedSpec, "tile " + std::to_string(tile) + " lacks integer field '" + key + "'");
  return it->get<int>();
}

}  // namespace

TileSet validate_tileset(const nlohmann::json& spec) {
  if (!spec.is_object()) throw Error(ErrorCode::MalformedSpec, "tile set must be a JSON object");
  if (!spec.contains("colors") || !spec["colors"].is_array())
    throw Error(ErrorCode::MalformedSpec, "missing 'colors' array");
  if (!spec.contains("tiles") || !spec["tiles"].is_array())
    throw Error(ErrorCode::MalformedSpec, "missing 'tiles' array");

  std::vector<std::string> raw_colors;
  for (const auto& c : spec["colors"]) {
    if (!c.is_string()) throw Error(ErrorCode::MalformedSpec, "color names must be strings");
    raw_colors.push_back(c.get<std::string>());
  }
  const int nc = static_cast<int>(raw_colors.size());

  TileSet ts;
  ts.name = spec.value("name", std::string("unnamed"));
  std::vector<Part> parts;
  bool any_part = false;
  std::set<std::tuple<int, int, int, int, std::string>> seen;
  std::size_t idx = 0;
  for (const auto& jt : spec["tiles"]) {
    if (!jt.is_object()) throw Error(ErrorCode::MalformedSpec, "tile " + std::to_string(idx) + " is not an object");
    Tile t;
    t.left = required_int(jt, "l", idx);
    t.right = required_int(jt, "r", idx);
    t.top = required_int(jt, "t", idx);
    t.bottom = required_int(jt, "b", idx);
    for (int c : {t.left, t.right, t.top, t.bottom})
      if (c < 0 || c >= nc)
        throw Error(ErrorCode::ColorOutOfRange, "tile " + std::to_string(idx) + " uses color " + std::to_string(c) +
                                                    " of " + std::to_string(nc));
    if (jt.contains("label")) {
      if (!jt["label"].is_string()) throw Error(ErrorCode::MalformedSpec, "label must be a string");
      t.label = jt["label"].get<std::string>();
    }
    Part part = Part::None;
    if (jt.contains("part")) {
      const std::string p = jt["part"].is_string() ? jt["part"].get<std::string>() : "";
      if (p == "A") part = Part::A;
      else if (p == "B") part = Part::B;
      else throw Error(ErrorCode::MalformedSpec, "part must be \"A\" or \"B\"");
      any_part = true;
    }
    if (!seen.emplace(t.left, t.right, t.top, t.bottom, t.label).second)
      throw Error(ErrorCode::DuplicateTile, "tile " + std::to_string(idx) + " repeats an earlier (colors, label)");
    ts.tiles.push_back(t);
    parts.push_back(part);
    ++idx;
  }

  std::vector<int> remap(static_cast<std::size_t>(nc), -1);
  for (const Tile& t : ts.tiles)
    for (int c : {t.left, t.right, t.top, t.bottom}) remap[static_cast<std::size_t>(c)] = 0;
  for (int c = 0; c < nc; ++c) {
    if (remap[static_cast<std::size_t>(c)] < 0) continue;
    remap[static_cast<std::size_t>(c)] = ts.color_count();
    ts.colors.push_back(raw_colors[static_cast<std::size_t>(c)]);
  }
  for (Tile& t : ts.tiles) {
    t.left = remap[static_cast<std::size_t>(t.left)];
    t.right = remap[static_cast<std::size_t>(t.right)];
    t.top = remap[static_cast<std::size_t>(t.top)];
    t.bottom = remap[static_cast<std::size_t>(t.bottom)];
  }
  if (any_part) ts.parts = parts;
  return ts;
}

nlohmann::json to_json(const TileSet& ts) {
  nlohmann::json j;
  j["name"] = ts.name;
  j["colors"] = ts.colors;
  j["tiles"] = nlohmann::json::array();
  for (TileId i = 0; i < ts.size(); ++i) {
    const Tile& t = ts.tiles[static_cast<std::size_t>(i)];
    nlohmann::json jt = {{"l", t.left}, {"r", t.right}, {"t", t.top}, {"b", t.bottom}};
    if (!t.label.empty()) jt["label"] = t.label;
    if (ts.part(i) != Part::None) jt["part"] = std::string(1, static_cast<char>(ts.part(i)));
    j["tiles"].push_back(jt);
  }
  return j;
}

nlohmann::json to_json(const PatchTiling& p) {
  return {{"x0", p.region.x0}, {"y0", p.region.y0}, {"w", p.region.width}, {"h", p.region.height}, {"cells", p.cells}};
}

PatchTiling patch_from_json(const nlohmann::json& j) {
  try {
    Region r{j.at("x0").get<int>(), j.at("y0").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
    if (r.width < 1 || r.height < 1) throw Error(ErrorCode::MalformedSpec, "patch must be at least 1x1");
    PatchTiling p(r);
    p.cells = j.at("cells").get<std::vector<TileId>>();
    if (p.cells.size() != r.cell_count()) throw Error(ErrorCode::MalformedSpec, "cell count does not match w*h");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, e.what());
  }
}

std::string render_ppm(const PatchTiling& p, int scale) {
  if (scale < 1) throw Error(ErrorCode::InvalidArgument, "scale must be >= 1");
  const int w = p.region.width * scale;
  const int h = p.region.height * scale;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (int py = h - 1; py >= 0; --py) {
    const int y = p.region.y0 + py / scale;
    for (int px = 0; px < w; ++px) {
      const TileId t = p.at(p.region.x0 + px / scale, y);
      std::uint64_t z = 0;
      if (t != kHole) {
        z = static_cast<std::uint64_t>(t) + 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        z |= 0x404040;  // keep tiles distinguishable from black holes
      }
      out.push_back(static_cast<char>(z & 0xFF));
      out.push_back(static_cast<char>((z >> 8) & 0xFF));
      out.push_back(static_cast<char>((z >> 16) & 0xFF));
    }
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tileforge
