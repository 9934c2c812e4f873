use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use settol::csp::resolve_labels;
use settol::mst::Graph;
use settol::{CspInstance, ExplicitCsp, Subset};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Explicit instance in JSON (elements, costs, solutions).
    #[arg(long, value_name = "PATH", conflicts_with = "graph")]
    pub csp: Option<PathBuf>,

    /// Graph as an edge list (`u v cost` per line) or JSON.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,

    /// Graph file format; defaults to json for `.json` files, text otherwise.
    #[arg(long, value_enum, requires = "graph")]
    pub graph_format: Option<GraphFormat>,
}

pub enum Instance {
    Csp(ExplicitCsp),
    Graph(Graph),
}

impl Instance {
    pub fn as_dyn(&self) -> &dyn CspInstance {
        match self {
            Instance::Csp(c) => c,
            Instance::Graph(g) => g,
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            Instance::Graph(g) => Some(g),
            Instance::Csp(_) => None,
        }
    }

    pub fn label(&self, i: usize) -> &str {
        self.as_dyn().label(i)
    }

    pub fn name(&self, set: Subset) -> String {
        let labels: Vec<&str> = set.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", labels.join(","))
    }

    /// Resolves a comma-separated label list; empty entries are ignored.
    pub fn resolve(&self, labels: &[String]) -> Result<Subset, Failure> {
        let labels: Vec<&str> = labels
            .iter()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty())
            .collect();
        Ok(resolve_labels(self.as_dyn(), &labels)?)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

impl InstanceArgs {
    pub fn is_given(&self) -> bool {
        self.csp.is_some() || self.graph.is_some()
    }

    pub fn load(&self) -> Result<Instance, Failure> {
        if let Some(path) = &self.csp {
            return Ok(Instance::Csp(
                ExplicitCsp::from_json(&read(path)?).map_err(Failure::input)?,
            ));
        }
        let Some(path) = &self.graph else {
            return Err(Failure::request("one of --csp or --graph is required"));
        };
        let text = read(path)?;
        let format = self.graph_format.unwrap_or_else(|| {
            if path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            {
                GraphFormat::Json
            } else {
                GraphFormat::Text
            }
        });
        let g = match format {
            GraphFormat::Text => Graph::from_text(&text),
            GraphFormat::Json => Graph::from_json(&text),
        };
        Ok(Instance::Graph(g.map_err(Failure::input)?))
    }
}
