#include "metaglyph/regions.hpp"

#include <cctype>

namespace metaglyph {

namespace {

struct Row {
  const char* name;
  double lon;
  double lat;
};

// Approximate geographic centroids (degrees).
constexpr Row kCountries[] = {
    {"Afghanistan", 66.0, 33.9},     {"Albania", 20.0, 41.1},         {"Algeria", 2.6, 28.2},
    {"Angola", 17.5, -12.3},         {"Argentina", -65.2, -35.4},     {"Armenia", 44.9, 40.3},
    {"Australia", 134.5, -25.7},     {"Austria", 14.1, 47.6},         {"Azerbaijan", 47.7, 40.3},
    {"Bangladesh", 90.3, 23.8},      {"Belarus", 28.0, 53.5},         {"Belgium", 4.6, 50.6},
    {"Bolivia", -64.7, -16.7},       {"Bosnia and Herzegovina", 17.8, 44.2},
    {"Botswana", 23.8, -22.2},       {"Brazil", -53.1, -10.8},        {"Bulgaria", 25.2, 42.8},
    {"Cambodia", 104.9, 12.7},       {"Cameroon", 12.7, 5.7},         {"Canada", -98.3, 61.4},
    {"Chad", 18.7, 15.3},            {"Chile", -71.4, -37.7},         {"China", 103.8, 36.6},
    {"Colombia", -73.1, 3.9},        {"Costa Rica", -84.2, 9.98},     {"Croatia", 16.4, 45.1},
    {"Cuba", -79.0, 21.6},           {"Czech Republic", 15.3, 49.7},  {"Denmark", 10.0, 56.0},
    {"Dominican Republic", -70.5, 18.9}, {"Ecuador", -78.8, -1.4},    {"Egypt", 29.9, 26.5},
    {"Estonia", 25.5, 58.7},         {"Ethiopia", 39.6, 8.6},         {"Finland", 26.3, 64.5},
    {"France", 2.5, 46.6},           {"Germany", 10.4, 51.1},         {"Ghana", -1.2, 7.95},
    {"Greece", 22.9, 39.1},          {"Guatemala", -90.4, 15.7},      {"Hungary", 19.4, 47.2},
    {"Iceland", -18.6, 65.0},        {"India", 79.6, 22.9},           {"Indonesia", 117.3, -2.2},
    {"Iran", 54.3, 32.6},            {"Iraq", 43.7, 33.0},            {"Ireland", -8.1, 53.2},
    {"Israel", 35.0, 31.5},          {"Italy", 12.1, 42.8},           {"Japan", 138.0, 37.6},
    {"Jordan", 36.8, 31.2},          {"Kazakhstan", 67.3, 48.2},      {"Kenya", 37.8, 0.6},
    {"Kuwait", 47.6, 29.3},          {"Laos", 103.8, 18.5},           {"Latvia", 24.9, 56.9},
    {"Lebanon", 35.9, 33.9},         {"Libya", 18.0, 27.0},           {"Lithuania", 23.9, 55.3},
    {"Luxembourg", 6.1, 49.8},       {"Madagascar", 46.7, -19.4},     {"Malaysia", 109.7, 3.8},
    {"Mali", -3.5, 17.3},            {"Mexico", -102.5, 23.9},        {"Mongolia", 103.1, 46.8},
    {"Morocco", -6.3, 31.9},         {"Mozambique", 35.5, -17.3},     {"Myanmar", 96.5, 21.2},
    {"Namibia", 17.2, -22.1},        {"Nepal", 83.9, 28.3},           {"Netherlands", 5.3, 52.1},
    {"New Zealand", 171.5, -41.8},   {"Nicaragua", -85.0, 12.8},      {"Niger", 9.4, 17.4},
    {"Nigeria", 8.1, 9.6},           {"North Korea", 127.2, 40.2},    {"Norway", 15.3, 68.8},
    {"Oman", 56.1, 20.6},            {"Pakistan", 69.4, 29.9},        {"Panama", -80.1, 8.5},
    {"Paraguay", -58.4, -23.2},      {"Peru", -74.4, -9.2},           {"Philippines", 122.9, 11.8},
    {"Poland", 19.4, 52.1},          {"Portugal", -8.5, 39.6},        {"Qatar", 51.2, 25.3},
    {"Romania", 25.0, 45.9},         {"Russia", 96.7, 61.98},         {"Saudi Arabia", 44.5, 24.1},
    {"Senegal", -14.5, 14.4},        {"Serbia", 20.8, 44.2},          {"Singapore", 103.8, 1.35},
    {"Slovakia", 19.5, 48.7},        {"Slovenia", 14.8, 46.1},        {"Somalia", 45.9, 4.8},
    {"South Africa", 25.1, -29.0},   {"South Korea", 127.8, 36.4},    {"Spain", -3.6, 40.2},
    {"Sri Lanka", 80.7, 7.7},        {"Sudan", 29.9, 16.0},           {"Sweden", 16.7, 62.8},
    {"Switzerland", 8.2, 46.8},      {"Syria", 38.5, 35.0},           {"Taiwan", 121.0, 23.8},
    {"Tanzania", 34.8, -6.3},        {"Thailand", 101.0, 15.1},       {"Tunisia", 9.6, 34.1},
    {"Turkey", 35.2, 39.1},          {"Uganda", 32.4, 1.3},           {"Ukraine", 31.4, 49.0},
    {"United Arab Emirates", 54.3, 23.9}, {"United Kingdom", -2.9, 54.1},
    {"United States", -98.6, 39.8},  {"Uruguay", -56.0, -32.8},       {"Uzbekistan", 63.1, 41.8},
    {"Venezuela", -66.2, 7.1},       {"Vietnam", 106.3, 16.6},        {"Yemen", 47.6, 15.9},
    {"Zambia", 27.8, -13.5},         {"Zimbabwe", 29.9, -19.0},
};

constexpr Row kSubdivisions[] = {
    // United States
    {"Alabama", -86.8, 32.8},        {"Alaska", -152.3, 64.2},        {"Arizona", -111.7, 34.3},
    {"Arkansas", -92.4, 34.9},       {"California", -119.4, 37.2},    {"Colorado", -105.5, 39.0},
    {"Connecticut", -72.7, 41.6},    {"Delaware", -75.5, 39.0},       {"Florida", -81.7, 28.6},
    {"Georgia", -83.4, 32.7},        {"Hawaii", -157.0, 20.3},        {"Idaho", -114.6, 44.4},
    {"Illinois", -89.2, 40.0},       {"Indiana", -86.3, 39.9},        {"Iowa", -93.5, 42.1},
    {"Kansas", -98.4, 38.5},         {"Kentucky", -85.3, 37.5},       {"Louisiana", -92.0, 31.1},
    {"Maine", -69.2, 45.4},          {"Maryland", -76.8, 39.0},       {"Massachusetts", -71.8, 42.3},
    {"Michigan", -85.4, 44.3},       {"Minnesota", -94.3, 46.3},      {"Mississippi", -89.7, 32.7},
    {"Missouri", -92.5, 38.4},       {"Montana", -109.6, 47.0},       {"Nebraska", -99.8, 41.5},
    {"Nevada", -116.6, 39.3},        {"New Hampshire", -71.6, 43.7},  {"New Jersey", -74.7, 40.2},
    {"New Mexico", -106.1, 34.4},    {"New York", -75.5, 42.9},       {"North Carolina", -79.4, 35.6},
    {"North Dakota", -100.5, 47.5},  {"Ohio", -82.8, 40.3},           {"Oklahoma", -97.5, 35.6},
    {"Oregon", -120.5, 43.9},        {"Pennsylvania", -77.6, 40.9},   {"Rhode Island", -71.5, 41.7},
    {"South Carolina", -80.9, 33.9}, {"South Dakota", -100.2, 44.4},  {"Tennessee", -86.3, 35.9},
    {"Texas", -99.3, 31.5},          {"Utah", -111.7, 39.3},          {"Vermont", -72.7, 44.1},
    {"Virginia", -78.8, 37.5},       {"Washington", -120.4, 47.4},    {"West Virginia", -80.6, 38.6},
    {"Wisconsin", -89.9, 44.6},      {"Wyoming", -107.6, 43.0},
    // Canada
    {"Alberta", -114.5, 55.0},       {"British Columbia", -124.8, 53.7}, {"Manitoba", -97.4, 55.0},
    {"New Brunswick", -66.4, 46.6},  {"Newfoundland and Labrador", -60.0, 53.1},
    {"Nova Scotia", -63.3, 45.0},    {"Ontario", -85.0, 50.0},        {"Quebec", -72.0, 52.9},
    {"Saskatchewan", -106.0, 55.0},
    // Australia
    {"New South Wales", 146.9, -32.2}, {"Queensland", 144.4, -22.5},  {"South Australia", 135.8, -30.1},
    {"Tasmania", 146.6, -42.0},      {"Victoria", 144.8, -36.9},      {"Western Australia", 122.3, -25.3},
};

struct Alias {
  const char* alias;
  const char* name;
};

constexpr Alias kAliases[] = {
    {"USA", "United States"},       {"US", "United States"},  {"United States of America", "United States"},
    {"UK", "United Kingdom"},       {"Great Britain", "United Kingdom"}, {"Britain", "United Kingdom"},
    {"Czechia", "Czech Republic"},  {"UAE", "United Arab Emirates"},     {"Korea", "South Korea"},
    {"Republic of Korea", "South Korea"}, {"Russian Federation", "Russia"}, {"Viet Nam", "Vietnam"},
    {"Holland", "Netherlands"},     {"Türkiye", "Turkey"},
};

}  // namespace

std::string normalize_region_key(std::string_view name) {
  std::string out;
  bool space = false;
  for (char c : name) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(uc));
  }
  return out;
}

RegionTable::RegionTable(std::vector<Region> regions) {
  for (auto& r : regions) add(std::move(r));
}

void RegionTable::add(Region r, std::vector<std::string> aliases) {
  const std::size_t idx = regions_.size();
  index_.emplace(normalize_region_key(r.name), idx);
  for (const auto& a : aliases) index_.emplace(normalize_region_key(a), idx);
  regions_.push_back(std::move(r));
}

const Region* RegionTable::find(std::string_view name) const {
  auto it = index_.find(normalize_region_key(name));
  return it == index_.end() ? nullptr : &regions_[it->second];
}

const RegionTable& RegionTable::builtin() {
  static const RegionTable table = [] {
    RegionTable t;
    for (const auto& row : kCountries) t.add({row.name, Region::Kind::Country, row.lon, row.lat});
    for (const auto& row : kSubdivisions) {
      // "Georgia" and "Victoria" collide with countries/cities; the first entry wins.
      if (t.contains(row.name)) continue;
      t.add({row.name, Region::Kind::Subdivision, row.lon, row.lat});
    }
    for (const auto& a : kAliases) {
      if (const Region* r = t.find(a.name)) t.index_.emplace(normalize_region_key(a.alias), static_cast<std::size_t>(r - t.regions_.data()));
    }
    return t;
  }();
  return table;
}

const std::vector<std::vector<Point>>& base_map_outlines() {
  static const std::vector<std::vector<Point>> outlines = {
      // North America
      {{-168, 65}, {-140, 70}, {-95, 72}, {-62, 60}, {-55, 50}, {-80, 25}, {-97, 18}, {-87, 13},
       {-105, 20}, {-117, 32}, {-125, 45}, {-140, 60}},
      // South America
      {{-80, 10}, {-60, 11}, {-35, -6}, {-40, -22}, {-58, -38}, {-68, -55}, {-75, -50}, {-71, -20},
       {-81, -5}},
      // Europe
      {{-10, 36}, {-9, 44}, {-5, 48}, {5, 54}, {10, 58}, {25, 71}, {40, 68}, {45, 45}, {28, 41},
       {15, 38}, {3, 42}},
      // Africa
      {{-17, 21}, {-5, 36}, {10, 37}, {33, 31}, {43, 12}, {51, 11}, {40, -15}, {33, -27}, {20, -35},
       {12, -18}, {9, 4}, {-8, 4}, {-17, 14}},
      // Asia
      {{45, 45}, {40, 68}, {70, 73}, {110, 77}, {140, 72}, {180, 68}, {160, 60}, {142, 46}, {121, 31},
       {108, 20}, {104, 1}, {97, 17}, {80, 7}, {72, 20}, {57, 25}, {48, 30}},
      // Australia
      {{114, -22}, {130, -12}, {142, -11}, {153, -25}, {150, -37}, {138, -35}, {116, -35}},
  };
  return outlines;
}

}  // namespace metaglyph
