#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "amodal/scene.hpp"

namespace amodal::test {

inline Mask rect(int w, int h, int x, int y, int rw, int rh) {
  Mask m(w, h);
  for (int yy = y; yy < y + rh; ++yy)
    for (int xx = x; xx < x + rw; ++xx)
      if (xx >= 0 && yy >= 0 && xx < w && yy < h) m.set(xx, yy);
  return m;
}

inline InstanceRecord instance(int id, int z, Mask amodal, Rgb color,
                               int category = 1) {
  InstanceRecord r;
  r.id = id;
  r.z = z;
  r.category = category;
  r.appearance = Appearance(amodal.width(), amodal.height(), color);
  r.amodal_mask = std::move(amodal);
  r.visible_mask = Mask(r.amodal_mask.width(), r.amodal_mask.height());
  return r;
}

inline constexpr Rgb kBackground{200, 200, 200};

inline Scene scene(int w, int h, std::vector<InstanceRecord> insts,
                   Rgb bg = kBackground) {
  return Scene::assemble(w, h, Appearance(w, h, bg), std::move(insts));
}

inline Mask random_mask(std::mt19937& rng, int w, int h, double p) {
  std::bernoulli_distribution bit(p);
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, bit(rng));
  return m;
}

inline Appearance random_image(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> v(0, 255);
  Appearance a(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      a.set(x, y, {std::uint8_t(v(rng)), std::uint8_t(v(rng)), std::uint8_t(v(rng))});
  return a;
}

// Scene of random rectangles with random ranks; ids 0..n-1.
inline Scene random_rect_scene(std::mt19937& rng, int w, int h, int n) {
  std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1);
  std::uniform_int_distribution<int> sz(2, std::max(2, w / 2));
  std::vector<int> ranks(n);
  for (int i = 0; i < n; ++i) ranks[i] = i;
  std::shuffle(ranks.begin(), ranks.end(), rng);
  std::vector<InstanceRecord> insts;
  for (int i = 0; i < n; ++i) {
    const int x = px(rng), y = py(rng);
    Mask m = rect(w, h, x, y, sz(rng), sz(rng));
    const Rgb c{std::uint8_t(20 * i + 10), std::uint8_t(255 - 15 * i), std::uint8_t(7 * i)};
    insts.push_back(instance(i, ranks[i], std::move(m), c, 1 + i % 40));
  }
  return scene(w, h, std::move(insts));
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("amodal_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace amodal::test
