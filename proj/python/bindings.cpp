#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ddlpb/coordinator.hpp"
#include "ddlpb/ddl.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/frames.hpp"
#include "ddlpb/mapper.hpp"
#include "ddlpb/mapping.hpp"
#include "ddlpb/mcp/fs_tools.hpp"
#include "ddlpb/mcp/propbank_tools.hpp"
#include "ddlpb/orchestrator.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace ddlpb;
using Json = nlohmann::ordered_json;

namespace {

py::object to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get_ref<const std::string&>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
    default: return py::none();
  }
}

Json from_py(const py::handle& o) {
  if (o.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(o)) return o.cast<bool>();
  if (py::isinstance<py::int_>(o)) return o.cast<std::int64_t>();
  if (py::isinstance<py::float_>(o)) return o.cast<double>();
  if (py::isinstance<py::str>(o)) return o.cast<std::string>();
  if (py::isinstance<py::dict>(o)) {
    Json out = Json::object();
    for (auto item : o.cast<py::dict>()) out[py::str(item.first).cast<std::string>()] = from_py(item.second);
    return out;
  }
  if (py::isinstance<py::list>(o) || py::isinstance<py::tuple>(o)) {
    Json out = Json::array();
    for (auto item : o) out.push_back(from_py(item));
    return out;
  }
  throw py::type_error("cannot convert " + std::string(py::str(py::type::handle_of(o))) + " to JSON");
}

mapper::MapperConfig mapper_config(std::size_t max_rolesets, std::size_t num_verbs, double min_confidence) {
  mapper::MapperConfig cfg;
  cfg.max_rolesets_per_table = max_rolesets;
  cfg.num_verbs = num_verbs;
  cfg.min_confidence = min_confidence;
  return cfg;
}

// The MCP servers keep their tool state behind shared pointers so the Python
// object can be copied freely.
struct ServerHandle {
  std::shared_ptr<mcp::McpServer> server;

  py::object handle(const py::object& message) const {
    auto response = server->handle(from_py(message));
    return response ? to_py(*response) : py::none();
  }
  py::object handle_text(const std::string& line) const {
    auto response = server->handle_text(line);
    return response ? py::object(py::str(mcp::to_wire(*response))) : py::none();
  }
  py::dict call_tool(const std::string& name, const py::object& arguments) const {
    auto result = server->call_tool(name, arguments.is_none() ? Json::object() : from_py(arguments));
    return to_py(result.to_json());
  }
};

struct PropBankHandle : ServerHandle {};
struct FsHandle : ServerHandle {};

}  // namespace

PYBIND11_MODULE(_ddlpb, m) {
  m.doc() = "C++ core of the ddlpb package";
  m.attr("__version__") = DDLPB_VERSION;
  m.attr("PROTOCOL_VERSION") = std::string(mcp::kProtocolVersion);

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<NotFoundError> not_found(m, "NotFoundError", PyExc_KeyError);
  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<LoadError> load_error(m, "LoadError", error.ptr());
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NotFoundError& e) {
      py::set_error(not_found, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const LoadError& e) {
      py::set_error(load_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<frames::FrameIndex>(m, "FrameIndex", "Immutable PropBank roleset index")
      .def_static(
          "load", [](const fs::path& dir) { return frames::FrameIndex::load(dir); }, py::arg("corpus_dir"),
          "Load every frame file under corpus_dir")
      .def_static(
          "load_with_report",
          [](const fs::path& dir) {
            frames::LoadReport report;
            auto index = frames::FrameIndex::load(dir, &report);
            return py::make_tuple(index, to_py(frames::to_json(report)));
          },
          py::arg("corpus_dir"))
      .def(
          "search_by_lemma",
          [](const frames::FrameIndex& self, const std::string& lemma, std::size_t max_results) {
            py::list out;
            for (const auto& h : self.search_by_lemma(lemma, max_results)) out.append(to_py(frames::to_json(h)));
            return out;
          },
          py::arg("lemma"), py::arg("max_results") = frames::FrameIndex::kDefaultMaxResults)
      .def(
          "search_by_sense_id",
          [](const frames::FrameIndex& self, const std::string& sense_id, bool include_examples) {
            return to_py(frames::to_json(self.search_by_sense_id(sense_id, include_examples)));
          },
          py::arg("sense_id"), py::arg("include_examples") = true)
      .def("contains_lemma", &frames::FrameIndex::contains_lemma, py::arg("lemma"))
      .def_property_readonly("lemma_count", &frames::FrameIndex::lemma_count)
      .def("__len__", &frames::FrameIndex::size)
      .def("__contains__", [](const frames::FrameIndex& self, const std::string& id) { return self.find(id) != nullptr; });

  py::class_<ddl::Schema>(m, "Schema", "Parsed DDL schema")
      .def_property_readonly("source_name", [](const ddl::Schema& s) { return s.source_name; })
      .def_property_readonly("table_names",
                             [](const ddl::Schema& s) {
                               std::vector<std::string> names;
                               for (const auto& t : s.tables) names.push_back(t.name);
                               return names;
                             })
      .def("to_dict", [](const ddl::Schema& s) { return to_py(ddl::to_json(s)); })
      .def("__len__", [](const ddl::Schema& s) { return s.tables.size(); })
      .def("__eq__", [](const ddl::Schema& a, const ddl::Schema& b) { return a == b; });

  m.def("parse_ddl", &ddl::parse_ddl, py::arg("text"), py::arg("source_name") = "");
  m.def("canonical_ddl", &ddl::to_canonical_ddl, py::arg("schema"));
  m.def(
      "table_context",
      [](const ddl::Schema& s, const std::string& table) { return to_py(ddl::to_json(ddl::table_context(s, table))); },
      py::arg("schema"), py::arg("table_name"));

  m.def(
      "serialize_mapping",
      [](const py::object& doc) {
        auto out = mapping::deserialize_mapping(from_py(doc).dump());
        return mapping::serialize_mapping(out);
      },
      py::arg("mapping"), "Validate a mapping dict and return its canonical JSON text");
  m.def(
      "deserialize_mapping",
      [](const std::string& text) { return to_py(mapping::to_json(mapping::deserialize_mapping(text))); },
      py::arg("text"));
  m.def(
      "classify_mapping_file",
      [](const fs::path& out, const std::string& db, const std::string& table) {
        auto st = mapping::classify_mapping_file(out, db, table);
        return py::make_tuple(std::string(mapping::to_string(st.status)), st.detail);
      },
      py::arg("output_dir"), py::arg("db_name"), py::arg("table_name"));
  m.def(
      "coordinate",
      [](const ddl::Schema& s, const fs::path& out, const std::string& db) {
        return to_py(coordinator::to_json(coordinator::coordinate(s, out, db)));
      },
      py::arg("schema"), py::arg("output_dir"), py::arg("db_name"));

  m.def(
      "baseline_verbs",
      [](const ddl::Schema& s, const std::string& table, const frames::FrameIndex& index, std::size_t num_verbs) {
        return mapper::baseline_verbs(ddl::table_context(s, table), num_verbs, index);
      },
      py::arg("schema"), py::arg("table_name"), py::arg("index"), py::arg("num_verbs") = 8);
  m.def(
      "map_table",
      [](const ddl::Schema& s, const std::string& table, const frames::FrameIndex& index, const fs::path& out,
         const std::string& db, std::size_t max_rolesets, std::size_t num_verbs, double min_confidence) {
        mapper::BaselineVerbProvider provider(index);
        auto cfg = mapper_config(max_rolesets, num_verbs, min_confidence);
        auto ctx = ddl::table_context(s, table);
        mapping::TableMappingOutput result;
        {
          py::gil_scoped_release release;
          result = mapper::map_table(ctx, index, provider, cfg, out, db);
        }
        return to_py(mapping::to_json(mapping::canonicalize(result)));
      },
      py::arg("schema"), py::arg("table_name"), py::arg("index"), py::arg("output_dir"), py::arg("db_name"),
      py::arg("max_rolesets_per_table") = 15, py::arg("num_verbs") = 8, py::arg("min_confidence") = 0.0);
  m.def(
      "run",
      [](const fs::path& ddl_file, const std::string& db, const fs::path& out, const frames::FrameIndex& index,
         std::size_t max_rolesets, std::size_t concurrency, std::size_t max_iterations, std::size_t num_verbs) {
        orchestrator::RunOptions opts;
        opts.mapper = mapper_config(max_rolesets, num_verbs, 0.0);
        opts.concurrency = concurrency;
        opts.max_iterations = max_iterations;
        mapper::BaselineVerbProvider provider(index);
        orchestrator::RunReport report;
        {
          py::gil_scoped_release release;
          report = orchestrator::run(ddl_file, db, out, index, provider, opts);
        }
        return to_py(orchestrator::to_json(report));
      },
      py::arg("ddl_file"), py::arg("db_name"), py::arg("output_folder"), py::arg("index"),
      py::arg("max_rolesets_per_table") = 15, py::arg("concurrency") = 4, py::arg("max_iterations") = 3,
      py::arg("num_verbs") = 8,
      "Map every pending table of ddl_file and return the run report");

  py::class_<PropBankHandle>(m, "PropBankServer", "MCP server exposing the frame index tools")
      .def(py::init([](const frames::FrameIndex& index) {
             return PropBankHandle{{std::make_shared<mcp::McpServer>(mcp::make_propbank_server(index))}};
           }),
           py::arg("index"))
      .def("handle", &ServerHandle::handle, py::arg("message"), "Dispatch one JSON-RPC message given as a dict")
      .def("handle_text", &ServerHandle::handle_text, py::arg("line"), "Dispatch one serialized message")
      .def("call_tool", &ServerHandle::call_tool, py::arg("name"), py::arg("arguments") = py::none());

  py::class_<FsHandle>(m, "FsServer", "MCP server exposing sandboxed filesystem tools")
      .def(py::init([](const std::vector<fs::path>& allowed_dirs, bool read_only) {
             return FsHandle{{std::make_shared<mcp::McpServer>(mcp::make_fs_server({allowed_dirs, read_only}))}};
           }),
           py::arg("allowed_dirs"), py::arg("read_only") = false)
      .def("handle", &ServerHandle::handle, py::arg("message"))
      .def("handle_text", &ServerHandle::handle_text, py::arg("line"))
      .def("call_tool", &ServerHandle::call_tool, py::arg("name"), py::arg("arguments") = py::none());
}
