#include "golap/dataset.hpp"

#include "golap/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace golap {

Table parse_csv(std::string_view text) {
   if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

   std::vector<std::vector<std::string>> records;
   std::vector<std::string> record;
   std::string field;
   bool quoted = false, field_started = false;
   std::size_t line = 1;

   auto end_field = [&] {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
   };
   auto end_record = [&] {
      end_field();
      if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
      record.clear();
   };

   for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (quoted) {
         if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
               field += '"';
               ++i;
            } else {
               quoted = false;
            }
         } else {
            if (c == '\n') ++line;
            field += c;
         }
         continue;
      }
      switch (c) {
         case '"':
            if (field_started) throw Error(ErrorCode::SyntaxError, "csv line " + std::to_string(line) + ": stray quote");
            quoted = field_started = true;
            break;
         case ',':
            end_field();
            break;
         case '\r':
            break;
         case '\n':
            end_record();
            ++line;
            break;
         default:
            field += c;
            field_started = true;
      }
   }
   if (quoted) throw Error(ErrorCode::SyntaxError, "csv: unterminated quoted field");
   if (field_started || !field.empty() || !record.empty()) end_record();

   Table t;
   if (records.empty()) return t;
   t.columns = std::move(records.front());
   for (std::size_t r = 1; r < records.size(); ++r) {
      if (records[r].size() != t.columns.size()) {
         throw Error(ErrorCode::SyntaxError, "csv record " + std::to_string(r + 1) + " has " +
                                                 std::to_string(records[r].size()) + " fields, expected " +
                                                 std::to_string(t.columns.size()));
      }
      t.rows.push_back(std::move(records[r]));
   }
   return t;
}

namespace {

const Table& find_table(const std::map<std::string, Table>& tables, const std::string& name) {
   if (auto it = tables.find(name); it != tables.end()) return it->second;
   for (const auto& [k, v] : tables) {
      if (iequals(k, name)) return v;
   }
   throw Error(ErrorCode::FileNotFound, "no table for '" + name + "'");
}

std::optional<std::size_t> column_of(const Table& t, std::string_view name) {
   for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (t.columns[i] == name) return i;
   }
   return std::nullopt;
}

} // namespace

Dataset Dataset::load(Constellation c, const std::map<std::string, Table>& tables) {
   Dataset ds;
   ds.constellation_ = std::make_shared<const Constellation>(std::move(c));
   const Constellation& cs = *ds.constellation_;

   for (const auto& d : cs.dimensions) {
      const Table& t = find_table(tables, d.name);
      std::vector<std::optional<std::size_t>> cols;
      for (const auto& a : d.attributes) {
         auto col = column_of(t, a.name);
         if (!col && a.name != kAll) {
            throw Error(ErrorCode::MissingColumn, "table " + d.name + " lacks column '" + a.name + "'");
         }
         cols.push_back(col);
      }
      std::size_t id_index = *d.attribute_index(d.id_attribute);
      DimensionTable dt;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
         std::vector<Value> values;
         for (std::size_t k = 0; k < d.attributes.size(); ++k) {
            const auto& a = d.attributes[k];
            if (a.name == kAll) {
               if (cols[k] && t.rows[r][*cols[k]] != kAllValue) {
                  throw Error(ErrorCode::InvalidValue, d.name + " row " + std::to_string(r + 1) + ": All must be 'all'");
               }
               values.emplace_back(std::string(kAllValue));
               continue;
            }
            const std::string& raw = t.rows[r][*cols[k]];
            auto v = parse_value(raw, a.kind);
            if (!v) {
               throw Error(ErrorCode::InvalidValue, d.name + " row " + std::to_string(r + 1) + ": '" + raw +
                                                        "' is not a valid " + std::string(to_string(a.kind)) +
                                                        " for " + a.name);
            }
            values.push_back(std::move(*v));
         }
         if (!dt.by_id.emplace(values[id_index], dt.rows.size()).second) {
            throw Error(ErrorCode::DuplicateId, d.name + ": identifier '" + format_value(values[id_index]) +
                                                    "' appears twice");
         }
         dt.rows.push_back(std::move(values));
      }
      ds.dimensions_.push_back(std::move(dt));
   }

   for (const auto& f : cs.facts) {
      const Table& t = find_table(tables, f.name);
      FactTable ft;
      if (t.columns.empty() && t.rows.empty()) {
         ds.facts_.push_back(std::move(ft));
         continue;
      }
      std::vector<std::size_t> measure_cols;
      for (const auto& m : f.measures) {
         auto col = column_of(t, m.name);
         if (!col) throw Error(ErrorCode::MissingColumn, "table " + f.name + " lacks measure column '" + m.name + "'");
         measure_cols.push_back(*col);
      }
      const auto& star = cs.star_of(f.name);
      std::vector<std::size_t> link_cols;
      std::vector<std::size_t> link_dims;
      for (const auto& dn : star) {
         std::size_t di = *cs.dimension_index(dn);
         const Dimension& d = cs.dimensions[di];
         std::optional<std::size_t> col;
         for (std::size_t i = 0; i < t.columns.size() && !col; ++i) {
            if (iequals(t.columns[i], d.name)) col = i;
         }
         if (!col) col = column_of(t, d.id_attribute);
         if (!col) {
            throw Error(ErrorCode::MissingColumn,
                        "table " + f.name + " lacks link column '" + d.id_attribute + "' (or '" + d.name + "')");
         }
         link_cols.push_back(*col);
         link_dims.push_back(di);
      }
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
         std::vector<double> ms;
         for (std::size_t k = 0; k < measure_cols.size(); ++k) {
            const std::string& raw = t.rows[r][measure_cols[k]];
            auto v = parse_double(raw);
            if (!v) {
               throw Error(ErrorCode::NonNumericMeasure, f.name + " row " + std::to_string(r + 1) + ": '" + raw +
                                                             "' is not numeric (" + f.measures[k].name + ")");
            }
            ms.push_back(*v);
         }
         std::vector<std::size_t> links;
         for (std::size_t k = 0; k < link_cols.size(); ++k) {
            const Dimension& d = cs.dimensions[link_dims[k]];
            const std::string& raw = t.rows[r][link_cols[k]];
            const auto& id_attr = *d.attribute(d.id_attribute);
            auto key = parse_value(raw, id_attr.kind);
            const auto& by_id = ds.dimensions_[link_dims[k]].by_id;
            auto it = key ? by_id.find(*key) : by_id.end();
            if (it == by_id.end()) {
               throw Error(ErrorCode::DanglingLink, f.name + " row " + std::to_string(r + 1) + ": " + d.id_attribute +
                                                        "=" + raw + " does not exist in " + d.name);
            }
            links.push_back(it->second);
         }
         ft.measures.push_back(std::move(ms));
         ft.links.push_back(std::move(links));
      }
      ds.facts_.push_back(std::move(ft));
   }
   return ds;
}

const DimensionTable& Dataset::dimension_table(std::string_view dimension) const {
   auto idx = constellation_->dimension_index(dimension);
   if (!idx) throw Error(ErrorCode::UnknownDimension, "unknown dimension '" + std::string(dimension) + "'");
   return dimensions_[*idx];
}

const FactTable& Dataset::fact_table(std::string_view fact) const {
   for (std::size_t i = 0; i < constellation_->facts.size(); ++i) {
      if (iequals(constellation_->facts[i].name, fact)) return facts_[i];
   }
   throw Error(ErrorCode::UnknownFact, "unknown fact '" + std::string(fact) + "'");
}

const Value& Dataset::value(std::string_view dimension, std::size_t row, std::string_view attribute) const {
   const Dimension* d = constellation_->dimension(dimension);
   if (!d) throw Error(ErrorCode::UnknownDimension, "unknown dimension '" + std::string(dimension) + "'");
   auto idx = d->attribute_index(attribute);
   if (!idx) throw Error(ErrorCode::UnknownAttribute, d->name + " has no attribute '" + std::string(attribute) + "'");
   return dimension_table(dimension).rows.at(row)[*idx];
}

std::vector<std::vector<Value>> Dataset::member_values(std::string_view dimension,
                                                       const std::vector<std::string>& path) const {
   const Dimension* d = constellation_->dimension(dimension);
   if (!d) throw Error(ErrorCode::UnknownDimension, "unknown dimension '" + std::string(dimension) + "'");
   std::vector<std::size_t> idx;
   for (const auto& a : path) {
      auto i = d->attribute_index(a);
      if (!i) throw Error(ErrorCode::UnknownAttribute, d->name + " has no attribute '" + a + "'");
      idx.push_back(*i);
   }
   auto less = [](const std::vector<Value>& a, const std::vector<Value>& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ValueLess{});
   };
   std::set<std::vector<Value>, decltype(less)> distinct(less);
   for (const auto& row : dimension_table(dimension).rows) {
      std::vector<Value> tuple;
      for (auto i : idx) tuple.push_back(row[i]);
      distinct.insert(std::move(tuple));
   }
   return {distinct.begin(), distinct.end()};
}

std::string read_file(const std::filesystem::path& path) {
   std::ifstream in(path, std::ios::binary);
   if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
   std::ostringstream ss;
   ss << in.rdbuf();
   return ss.str();
}

Dataset load_dataset_dir(const std::filesystem::path& dir) {
   namespace fs = std::filesystem;
   if (!fs::is_directory(dir)) throw Error(ErrorCode::FileNotFound, dir.string() + " is not a directory");

   std::vector<fs::path> schemas;
   std::map<std::string, fs::path> csvs;
   for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      auto ext = entry.path().extension().string();
      if (ext == ".schema") schemas.push_back(entry.path());
      if (ext == ".csv") csvs.emplace(entry.path().stem().string(), entry.path());
   }
   if (schemas.size() != 1) {
      throw Error(ErrorCode::FileNotFound,
                  dir.string() + " must contain exactly one .schema file (found " + std::to_string(schemas.size()) + ")");
   }
   Constellation c = validate_constellation(parse_schema_document(read_file(schemas.front())));

   std::map<std::string, Table> tables;
   auto load_one = [&](const std::string& name) {
      auto it = csvs.find(name);
      if (it == csvs.end()) {
         it = std::find_if(csvs.begin(), csvs.end(), [&](const auto& kv) { return iequals(kv.first, name); });
      }
      if (it == csvs.end()) throw Error(ErrorCode::FileNotFound, "missing " + name + ".csv in " + dir.string());
      try {
         tables.emplace(name, parse_csv(read_file(it->second)));
      } catch (const Error& e) {
         throw Error(e.code(), it->second.filename().string() + ": " + e.detail());
      }
   };
   for (const auto& d : c.dimensions) load_one(d.name);
   for (const auto& f : c.facts) load_one(f.name);
   return Dataset::load(std::move(c), tables);
}

} // namespace golap
