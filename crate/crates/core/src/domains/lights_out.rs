use std::sync::Arc;

use crate::strips::{
    Atom, Domain, DomainBuilder, GroundAction, GroundLiteral, Instance, PredId, SchemaId, State,
};

/// A `rows × cols` grid with 4-neighbourhood adjacency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Board {
    pub rows: usize,
    pub cols: usize,
}

impl Board {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "board dimensions must be positive");
        Board { rows, cols }
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.cols, v % self.cols)
    }

    /// Closed neighbourhood `N[v]` in row-major order (so `v` itself sits
    /// between its upper/left and right/lower neighbours).
    pub fn neighborhood(&self, v: usize) -> Vec<usize> {
        let (r, c) = self.coords(v);
        let mut out = Vec::with_capacity(5);
        if r > 0 {
            out.push(self.cell(r - 1, c));
        }
        if c > 0 {
            out.push(self.cell(r, c - 1));
        }
        out.push(v);
        if c + 1 < self.cols {
            out.push(self.cell(r, c + 1));
        }
        if r + 1 < self.rows {
            out.push(self.cell(r + 1, c));
        }
        out
    }

    fn coord_tag(&self, v: usize) -> String {
        let (r, c) = self.coords(v);
        if self.rows <= 10 && self.cols <= 10 {
            format!("{r}{c}")
        } else {
            format!("{r}_{c}")
        }
    }

    /// `L{r}{c}`.
    pub fn light_name(&self, v: usize) -> String {
        format!("L{}", self.coord_tag(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LightsOutKind {
    Conditional,
    WellFormed,
}

/// A propositionalized Lights Out domain with its fixed object list (the
/// lights, declared as domain constants) and the all-off goal.
#[derive(Clone, Debug)]
pub struct LightsOut {
    pub board: Board,
    pub kind: LightsOutKind,
    pub domain: Arc<Domain>,
    pub on: PredId,
    pub out: PredId,
    first_schema: Vec<u32>,
    schema_cell: Vec<(usize, u32)>,
}

fn build(board: Board, kind: LightsOutKind) -> LightsOut {
    let name = match kind {
        LightsOutKind::Conditional => "lights-out-ce",
        LightsOutKind::WellFormed => "lights-out-wf",
    };
    let mut b = DomainBuilder::new(name);
    for v in 0..board.cells() {
        b.constant(board.light_name(v));
    }
    b.predicate("on", 1).predicate("out", 1);
    let mut first_schema = Vec::with_capacity(board.cells());
    let mut schema_cell = Vec::new();
    for v in 0..board.cells() {
        first_schema.push(schema_cell.len() as u32);
        let hood = board.neighborhood(v);
        let names: Vec<String> = hood.iter().map(|&u| board.light_name(u)).collect();
        let tag = board.coord_tag(v);
        match kind {
            LightsOutKind::Conditional => {
                let mut s = b.schema(format!("press-{tag}"), &[]);
                for l in &names {
                    s = s
                        .when(&[format!("out {l}")], &[format!("on {l}"), format!("!out {l}")])
                        .when(&[format!("on {l}")], &[format!("out {l}"), format!("!on {l}")]);
                }
                schema_cell.push((v, 0));
            }
            LightsOutKind::WellFormed => {
                for code in 0..(1u32 << hood.len()) {
                    let lit = |t: usize| code >> t & 1 == 1;
                    let mut pre_pos = Vec::new();
                    let mut pre_neg = Vec::new();
                    let mut eff_pos = Vec::new();
                    let mut eff_neg = Vec::new();
                    for (t, l) in names.iter().enumerate() {
                        let (now, next) = if lit(t) { ("on", "out") } else { ("out", "on") };
                        pre_pos.push(format!("{now} {l}"));
                        pre_neg.push(format!("!{next} {l}"));
                        eff_pos.push(format!("{next} {l}"));
                        eff_neg.push(format!("!{now} {l}"));
                    }
                    pre_pos.extend(pre_neg);
                    eff_pos.extend(eff_neg);
                    b.schema(format!("press-{tag}-{}", code + 1), &[])
                        .pre(&pre_pos)
                        .effect(&eff_pos);
                    schema_cell.push((v, code + 1));
                }
            }
        }
    }
    let domain = Arc::new(b.build().expect("lights out domain is well-formed"));
    LightsOut {
        board,
        kind,
        on: domain.predicate_id("on").unwrap(),
        out: domain.predicate_id("out").unwrap(),
        domain,
        first_schema,
        schema_cell,
    }
}

/// One nullary `press-{r}{c}` schema per cell, toggling every light of the
/// closed neighbourhood through a pair of conditional effects.
pub fn lights_out_conditional(board: Board) -> LightsOut {
    build(board, LightsOutKind::Conditional)
}

/// One nullary `press-{r}{c}-{k}` schema per cell and per on/off pattern of
/// its closed neighbourhood. Bit `t` of `k - 1` is the pattern of the `t`-th
/// neighbourhood cell in row-major order.
pub fn lights_out_well_formed(board: Board) -> LightsOut {
    build(board, LightsOutKind::WellFormed)
}

impl LightsOut {
    pub fn objects(&self) -> Vec<String> {
        self.domain.constants().to_vec()
    }

    pub fn state_of(&self, lit: &[bool]) -> State {
        lit.iter()
            .enumerate()
            .map(|(v, &on)| Atom::new(if on { self.on } else { self.out }, [v as u32]))
            .collect()
    }

    /// `lit[v]` for each cell.
    pub fn lit_of(&self, state: &State) -> Vec<bool> {
        (0..self.board.cells())
            .map(|v| state.contains(&Atom::new(self.on, [v as u32])))
            .collect()
    }

    pub fn goal(&self) -> Vec<GroundLiteral> {
        (0..self.board.cells())
            .map(|v| GroundLiteral::neg(Atom::new(self.on, [v as u32])))
            .collect()
    }

    pub fn instance(&self, lit: &[bool]) -> Instance {
        assert_eq!(lit.len(), self.board.cells());
        Instance::new(self.domain.clone(), self.objects(), self.state_of(lit), self.goal())
            .expect("lights out instance")
    }

    /// The press of `cell`; for the well-formed variant, the schema whose
    /// preconditions match `lit`.
    pub fn press(&self, cell: usize, lit: &[bool]) -> GroundAction {
        let k = match self.kind {
            LightsOutKind::Conditional => 0,
            LightsOutKind::WellFormed => self
                .board
                .neighborhood(cell)
                .iter()
                .enumerate()
                .map(|(t, &u)| (lit[u] as u32) << t)
                .sum(),
        };
        GroundAction::new(SchemaId(self.first_schema[cell] + k), [])
    }

    /// `(cell, k)`; `k = 0` for the conditional variant.
    pub fn cell_of(&self, schema: SchemaId) -> (usize, u32) {
        self.schema_cell[schema.0 as usize]
    }

    pub fn schemas_for_cell(&self, cell: usize) -> std::ops::Range<u32> {
        let start = self.first_schema[cell];
        let end = self
            .first_schema
            .get(cell + 1)
            .copied()
            .unwrap_or(self.schema_cell.len() as u32);
        start..end
    }
}
