//! Verification conditions: extraction from programs, brute-force checking
//! over finite windows, and synthesis of programs from condition lists.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{
    command_has_hole, command_vars, formula_has_opaque, formula_vars, term_vars, Block,
    BlockBody, Command, Decl, DeclKind, Formula, GuardedCommand, Ident, Program, ResolveError,
    Term, Terminal,
};
use crate::eval::{apply_command, eval_formula, CmdStep, Truth};
use crate::state::State;

/// One proof obligation: starting anywhere `pre` holds, running `command`
/// must land in a state where `post` holds (or block on its guard).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationCondition {
    pub pre_label: Ident,
    /// Fully resolved: no label references remain.
    pub pre: Formula,
    /// For an `if..fi` arm, a `Seq` whose first element is the guard as a
    /// `Command::Guard`; straight-line blocks have no guard prefix.
    pub command: Command,
    pub post_label: Ident,
    pub post: Formula,
}

fn flatten(c: &Command, out: &mut Vec<Command>) {
    match c {
        Command::Seq(cs) => {
            for c in cs {
                flatten(c, out);
            }
        }
        other => out.push(other.clone()),
    }
}

fn seq_of(mut cmds: Vec<Command>) -> Command {
    if cmds.len() == 1 {
        cmds.pop().expect("len checked")
    } else {
        Command::Seq(cmds)
    }
}

impl VerificationCondition {
    /// The guard and remaining body, with a `true` guard treated the same
    /// as no guard at all.
    pub fn parts(&self) -> (Option<Formula>, Vec<Command>) {
        let mut cmds = Vec::new();
        flatten(&self.command, &mut cmds);
        match cmds.first() {
            Some(Command::Guard(Formula::TrueF)) => (None, cmds.split_off(1)),
            Some(Command::Guard(g)) => {
                let g = g.clone();
                (Some(g), cmds.split_off(1))
            }
            _ => (None, cmds),
        }
    }

    /// Guard-prefix differences aside, structurally identical conditions
    /// compare equal under this form.
    pub fn normalized(&self) -> VerificationCondition {
        let (guard, body) = self.parts();
        let mut cmds = Vec::new();
        if let Some(g) = guard {
            cmds.push(Command::Guard(g));
        }
        cmds.extend(body);
        VerificationCondition { command: seq_of(cmds), ..self.clone() }
    }

    fn free_vars(&self) -> (BTreeSet<Ident>, BTreeSet<Ident>) {
        let mut scalars = BTreeSet::new();
        let mut arrays = BTreeSet::new();
        formula_vars(&self.pre, &mut scalars, &mut arrays);
        command_vars(&self.command, &mut scalars, &mut arrays);
        formula_vars(&self.post, &mut scalars, &mut arrays);
        (scalars, arrays)
    }
}

/// One condition per guarded command: `{pre} guard; body {post of target}`.
/// Straight blocks yield one guard-free condition; abort blocks and the
/// halt return yield none. Return terminals point at the halt assertion.
pub fn extract_vcs(program: &Program) -> Result<Vec<VerificationCondition>, ResolveError> {
    let mut resolved: BTreeMap<Ident, Formula> = BTreeMap::new();
    for b in &program.blocks {
        resolved.insert(b.label.clone(), program.resolve_assertion(&b.label)?);
    }
    let mut out = Vec::new();
    let post_of = |terminal: &Terminal| -> (Ident, Formula) {
        let label = match terminal {
            Terminal::Goto(l) => l,
            Terminal::Return(_) => &program.halt,
        };
        (label.clone(), resolved[label].clone())
    };
    for b in &program.blocks {
        let pre = resolved[&b.label].clone();
        match &b.body {
            BlockBody::Abort | BlockBody::Return(_) => {}
            BlockBody::Straight(cmd, terminal) => {
                let mut cmds = Vec::new();
                flatten(cmd, &mut cmds);
                let (post_label, post) = post_of(terminal);
                out.push(VerificationCondition {
                    pre_label: b.label.clone(),
                    pre: pre.clone(),
                    command: seq_of(cmds),
                    post_label,
                    post,
                });
            }
            BlockBody::IfFi(arms) => {
                for gc in arms {
                    let mut cmds = alloc::vec![Command::Guard(gc.guard.clone())];
                    flatten(&gc.body, &mut cmds);
                    let (post_label, post) = post_of(&gc.terminal);
                    out.push(VerificationCondition {
                        pre_label: b.label.clone(),
                        pre: pre.clone(),
                        command: seq_of(cmds),
                        post_label,
                        post,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The finite state window a condition is checked over.
#[derive(Clone, Debug)]
pub struct DomainWindow {
    /// Inclusive per-variable overrides.
    pub per_variable: BTreeMap<Ident, (i64, i64)>,
    /// Inclusive range for every variable without an override.
    pub default_range: (i64, i64),
    /// Inclusive range for array cells.
    pub array_elements: (i64, i64),
    /// Arrays are tried at every length `1..=cap`.
    pub array_length_cap: u32,
    /// Refuse windows whose state count exceeds this.
    pub state_cap: u64,
}

impl Default for DomainWindow {
    fn default() -> Self {
        DomainWindow {
            per_variable: BTreeMap::new(),
            default_range: (1, 12),
            array_elements: (0, 4),
            array_length_cap: 4,
            state_cap: 10_000_000,
        }
    }
}

impl DomainWindow {
    /// Every scalar and every array cell ranges over `lo..=hi`.
    pub fn uniform(lo: i64, hi: i64) -> Self {
        DomainWindow {
            default_range: (lo, hi),
            array_elements: (lo, hi),
            ..DomainWindow::default()
        }
    }

    fn range_of(&self, v: &Ident) -> (i64, i64) {
        self.per_variable.get(v).copied().unwrap_or(self.default_range)
    }
}

fn span(r: (i64, i64)) -> u128 {
    if r.1 < r.0 {
        0
    } else {
        (r.1 as i128 - r.0 as i128 + 1) as u128
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotCheckableReason {
    /// Prose appears in the pre, post, or a guard.
    Opaque,
    /// The command contains an unfilled hole.
    Hole,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VcVerdict {
    /// Every in-window state satisfying the pre lands on the post.
    Valid,
    /// The smallest witness in variable-name order. `post_state` is absent
    /// when the command faulted instead of finishing.
    CounterExample { state: State, post_state: Option<State> },
    NotCheckable(NotCheckableReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VcError {
    StateSpaceTooLarge { needed: u128, cap: u64 },
}

impl core::fmt::Display for VcError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VcError::StateSpaceTooLarge { needed, cap } => {
                write!(f, "window spans {needed} states, over the cap of {cap}")
            }
        }
    }
}

fn guard_has_opaque(c: &Command) -> bool {
    match c {
        Command::Guard(f) => formula_has_opaque(f),
        Command::Seq(cs) => cs.iter().any(guard_has_opaque),
        _ => false,
    }
}

/// Enumerate every state the window admits over the given variables,
/// stopping early when `f` produces a verdict.
fn for_each_state(
    scalars: &[(Ident, (i64, i64))],
    arrays: &[(Ident, (i64, i64))],
    length_cap: u32,
    state: &mut State,
    f: &mut impl FnMut(&State) -> Option<VcVerdict>,
) -> Option<VcVerdict> {
    if let Some(((name, (lo, hi)), rest)) = scalars.split_first() {
        for v in *lo..=*hi {
            state.set(name, v);
            if let Some(verdict) = for_each_state(rest, arrays, length_cap, state, f) {
                return Some(verdict);
            }
        }
        return None;
    }
    if let Some(((name, range), rest)) = arrays.split_first() {
        for len in 1..=length_cap as usize {
            state.set_array(name, alloc::vec![range.0; len]);
            if let Some(verdict) =
                fill_cells(name, 0, len, *range, rest, length_cap, state, f)
            {
                return Some(verdict);
            }
        }
        return None;
    }
    f(state)
}

#[allow(clippy::too_many_arguments)]
fn fill_cells(
    name: &Ident,
    idx: usize,
    len: usize,
    range: (i64, i64),
    rest: &[(Ident, (i64, i64))],
    length_cap: u32,
    state: &mut State,
    f: &mut impl FnMut(&State) -> Option<VcVerdict>,
) -> Option<VcVerdict> {
    if idx == len {
        return for_each_state(&[], rest, length_cap, state, f);
    }
    for v in range.0..=range.1 {
        state.set_array_elem(name, idx, v);
        if let Some(verdict) = fill_cells(name, idx + 1, len, range, rest, length_cap, state, f)
        {
            return Some(verdict);
        }
    }
    None
}

/// Brute-force check of one condition over the window. States where the
/// pre fails, faults, or blocks on the guard are vacuously fine; a false
/// post (or a fault after the guard passed) is a counterexample.
pub fn check_vc(
    vc: &VerificationCondition,
    window: &DomainWindow,
) -> Result<VcVerdict, VcError> {
    if command_has_hole(&vc.command) {
        return Ok(VcVerdict::NotCheckable(NotCheckableReason::Hole));
    }
    if formula_has_opaque(&vc.pre)
        || formula_has_opaque(&vc.post)
        || guard_has_opaque(&vc.command)
    {
        return Ok(VcVerdict::NotCheckable(NotCheckableReason::Opaque));
    }

    let (scalar_names, array_names) = vc.free_vars();
    let scalars: Vec<(Ident, (i64, i64))> = scalar_names
        .into_iter()
        .map(|v| {
            let r = window.range_of(&v);
            (v, r)
        })
        .collect();
    let arrays: Vec<(Ident, (i64, i64))> = array_names
        .into_iter()
        .map(|v| (v, window.array_elements))
        .collect();

    let mut needed: u128 = 1;
    for (_, r) in &scalars {
        needed = needed.saturating_mul(span(*r));
    }
    for _ in &arrays {
        let cells = span(window.array_elements);
        let mut per_array: u128 = 0;
        for len in 1..=window.array_length_cap {
            per_array = per_array.saturating_add(cells.saturating_pow(len));
        }
        needed = needed.saturating_mul(per_array);
    }
    if needed > window.state_cap as u128 {
        return Err(VcError::StateSpaceTooLarge { needed, cap: window.state_cap });
    }

    let mut scratch = State::new();
    let verdict = for_each_state(
        &scalars,
        &arrays,
        window.array_length_cap,
        &mut scratch,
        &mut |state| {
            match eval_formula(&vc.pre, state) {
                Ok(Truth::True) => {}
                Ok(Truth::False) => return None,
                // A pre that faults on this state cannot hold there.
                Err(_) => return None,
                Ok(Truth::Unknown) => {
                    return Some(VcVerdict::NotCheckable(NotCheckableReason::Opaque))
                }
            }
            let mut post_state = state.clone();
            match apply_command(&vc.command, &mut post_state, true) {
                Ok(CmdStep::Continue) => {}
                Ok(CmdStep::Blocked) | Ok(CmdStep::AnnotFailed(_)) => return None,
                Ok(CmdStep::GuardUnknown) => {
                    return Some(VcVerdict::NotCheckable(NotCheckableReason::Opaque))
                }
                Ok(CmdStep::HoleReached(_)) => {
                    return Some(VcVerdict::NotCheckable(NotCheckableReason::Hole))
                }
                Err(_) => {
                    return Some(VcVerdict::CounterExample {
                        state: state.clone(),
                        post_state: None,
                    })
                }
            }
            match eval_formula(&vc.post, &post_state) {
                Ok(Truth::True) => None,
                Ok(Truth::False) | Err(_) => Some(VcVerdict::CounterExample {
                    state: state.clone(),
                    post_state: Some(post_state),
                }),
                Ok(Truth::Unknown) => {
                    Some(VcVerdict::NotCheckable(NotCheckableReason::Opaque))
                }
            }
        },
    );
    Ok(verdict.unwrap_or(VcVerdict::Valid))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub valid: usize,
    pub counter_examples: usize,
    pub not_checkable: usize,
}

pub fn check_vcs(
    vcs: &[VerificationCondition],
    window: &DomainWindow,
) -> Result<(Vec<VcVerdict>, Tally), VcError> {
    let mut verdicts = Vec::with_capacity(vcs.len());
    let mut tally = Tally::default();
    for vc in vcs {
        let v = check_vc(vc, window)?;
        match &v {
            VcVerdict::Valid => tally.valid += 1,
            VcVerdict::CounterExample { .. } => tally.counter_examples += 1,
            VcVerdict::NotCheckable(_) => tally.not_checkable += 1,
        }
        verdicts.push(v);
    }
    Ok((verdicts, tally))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthError {
    /// A label named by a condition has no assertion.
    MissingAssertion(Ident),
    /// Conditions sharing a pre label must be adjacent in the list.
    InconsistentGrouping(Ident),
    /// The halt label may not be the pre of any condition.
    HaltHasConditions(Ident),
    /// The start label has neither conditions nor an assertion.
    MissingStart(Ident),
}

impl core::fmt::Display for SynthError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SynthError::MissingAssertion(l) => write!(f, "no assertion given for `{l}`"),
            SynthError::InconsistentGrouping(l) => {
                write!(f, "conditions for `{l}` are not adjacent")
            }
            SynthError::HaltHasConditions(l) => {
                write!(f, "halt label `{l}` appears as a pre label")
            }
            SynthError::MissingStart(l) => write!(f, "start label `{l}` has no block"),
        }
    }
}

/// Rebuild a program from a condition list. Each distinct pre label
/// becomes an `if..fi` block with one arm per condition; labels that only
/// carry an assertion become abort blocks; the halt block returns
/// `return_term`. Declarations are inferred from the variables used.
pub fn vcs_to_liffig(
    vcs: &[VerificationCondition],
    assertions: &BTreeMap<Ident, Formula>,
    start: &Ident,
    halt: &Ident,
    return_term: &Term,
) -> Result<Program, SynthError> {
    let mut order: Vec<Ident> = Vec::new();
    let mut groups: BTreeMap<Ident, Vec<GuardedCommand>> = BTreeMap::new();
    for vc in vcs {
        if &vc.pre_label == halt {
            return Err(SynthError::HaltHasConditions(halt.clone()));
        }
        for label in [&vc.pre_label, &vc.post_label] {
            if !assertions.contains_key(label) {
                return Err(SynthError::MissingAssertion(label.clone()));
            }
        }
        match order.last() {
            Some(last) if last == &vc.pre_label => {}
            _ => {
                if groups.contains_key(&vc.pre_label) {
                    return Err(SynthError::InconsistentGrouping(vc.pre_label.clone()));
                }
                order.push(vc.pre_label.clone());
            }
        }
        let (guard, body) = vc.parts();
        let terminal = Terminal::Goto(vc.post_label.clone());
        groups.entry(vc.pre_label.clone()).or_default().push(GuardedCommand {
            guard: guard.unwrap_or(Formula::TrueF),
            body: seq_of(body),
            terminal,
        });
    }

    if !assertions.contains_key(halt) {
        return Err(SynthError::MissingAssertion(halt.clone()));
    }

    let mut blocks = Vec::new();
    for label in &order {
        blocks.push(Block {
            label: label.clone(),
            assertion: assertions[label].clone(),
            body: BlockBody::IfFi(groups.remove(label).expect("grouped above")),
        });
    }
    // Assertion-only labels become abort blocks: arms not yet written.
    for (label, assertion) in assertions {
        if label != halt && !order.contains(label) {
            blocks.push(Block {
                label: label.clone(),
                assertion: assertion.clone(),
                body: BlockBody::Abort,
            });
        }
    }
    blocks.push(Block {
        label: halt.clone(),
        assertion: assertions[halt].clone(),
        body: BlockBody::Return(return_term.clone()),
    });

    if let Some(pos) = blocks.iter().position(|b| &b.label == start) {
        let start_block = blocks.remove(pos);
        blocks.insert(0, start_block);
    } else {
        return Err(SynthError::MissingStart(start.clone()));
    }

    let decls = infer_decls(&blocks, return_term);
    Ok(Program { decls, blocks, start: start.clone(), halt: halt.clone() })
}

/// Declare every variable mentioned anywhere. Array lengths are a best
/// effort: one past the largest constant index, and at least 1.
fn infer_decls(blocks: &[Block], return_term: &Term) -> Vec<Decl> {
    let mut scalars = BTreeSet::new();
    let mut arrays = BTreeSet::new();
    term_vars(return_term, &mut scalars, &mut arrays);
    for b in blocks {
        formula_vars(&b.assertion, &mut scalars, &mut arrays);
        match &b.body {
            BlockBody::IfFi(arms) => {
                for gc in arms {
                    formula_vars(&gc.guard, &mut scalars, &mut arrays);
                    command_vars(&gc.body, &mut scalars, &mut arrays);
                    if let Terminal::Return(t) = &gc.terminal {
                        term_vars(t, &mut scalars, &mut arrays);
                    }
                }
            }
            BlockBody::Straight(cmd, terminal) => {
                command_vars(cmd, &mut scalars, &mut arrays);
                if let Terminal::Return(t) = terminal {
                    term_vars(t, &mut scalars, &mut arrays);
                }
            }
            BlockBody::Return(t) => term_vars(t, &mut scalars, &mut arrays),
            BlockBody::Abort => {}
        }
    }
    let mut sizes: BTreeMap<Ident, u64> = arrays.iter().map(|a| (a.clone(), 1)).collect();
    for b in blocks {
        max_indices_formula(&b.assertion, &mut sizes);
        match &b.body {
            BlockBody::IfFi(arms) => {
                for gc in arms {
                    max_indices_formula(&gc.guard, &mut sizes);
                    max_indices_command(&gc.body, &mut sizes);
                }
            }
            BlockBody::Straight(cmd, _) => max_indices_command(cmd, &mut sizes),
            _ => {}
        }
    }
    let mut decls: Vec<Decl> = scalars
        .into_iter()
        .map(|name| Decl { name, kind: DeclKind::Scalar, init: None })
        .collect();
    decls.extend(arrays.into_iter().map(|name| {
        let size = sizes[&name];
        Decl { name: name.clone(), kind: DeclKind::Array(size), init: None }
    }));
    decls
}

fn bump_size(sizes: &mut BTreeMap<Ident, u64>, a: &Ident, idx: &Term) {
    if let Term::IntLit(i) = idx {
        if *i >= 0 {
            let want = *i as u64 + 1;
            let entry = sizes.entry(a.clone()).or_insert(1);
            *entry = (*entry).max(want);
        }
    }
}

fn max_indices_term(t: &Term, sizes: &mut BTreeMap<Ident, u64>) {
    match t {
        Term::ArrayRef(a, i) => {
            bump_size(sizes, a, i);
            max_indices_term(i, sizes);
        }
        Term::BinOp(_, x, y) => {
            max_indices_term(x, sizes);
            max_indices_term(y, sizes);
        }
        Term::Apply(_, args) => args.iter().for_each(|t| max_indices_term(t, sizes)),
        Term::IntLit(_) | Term::Var(_) => {}
    }
}

fn max_indices_formula(f: &Formula, sizes: &mut BTreeMap<Ident, u64>) {
    match f {
        Formula::Compare(_, a, b) => {
            max_indices_term(a, sizes);
            max_indices_term(b, sizes);
        }
        Formula::Pred(_, args) => args.iter().for_each(|t| max_indices_term(t, sizes)),
        Formula::Not(a) => max_indices_formula(a, sizes),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            max_indices_formula(a, sizes);
            max_indices_formula(b, sizes);
        }
        Formula::BoundedAll(_, lo, hi, body) | Formula::BoundedSome(_, lo, hi, body) => {
            max_indices_term(lo, sizes);
            max_indices_term(hi, sizes);
            max_indices_formula(body, sizes);
        }
        Formula::TrueF | Formula::FalseF | Formula::LabelRef(_) | Formula::Opaque(_) => {}
    }
}

fn max_indices_command(c: &Command, sizes: &mut BTreeMap<Ident, u64>) {
    match c {
        Command::ParAssign(lhs, rhs) => {
            for l in lhs {
                if let crate::ast::Lhs::ArrayElem(a, i) = l {
                    bump_size(sizes, a, i);
                    max_indices_term(i, sizes);
                }
            }
            rhs.iter().for_each(|t| max_indices_term(t, sizes));
        }
        Command::Guard(f) | Command::Annot(f) => max_indices_formula(f, sizes),
        Command::Seq(cs) => cs.iter().for_each(|c| max_indices_command(c, sizes)),
        Command::Swap(_, _) | Command::Hole(_) => {}
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeError {
    /// A replacement block restates its label's assertion differently.
    AssertionMismatch(Ident),
    /// A label that does not exist, where one must.
    UnknownTarget(Ident),
    /// Only abort and `if..fi` blocks accept new guarded commands.
    NotExtensible(Ident),
}

impl core::fmt::Display for MergeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MergeError::AssertionMismatch(l) => {
                write!(f, "assertion of `{l}` differs from the existing one")
            }
            MergeError::UnknownTarget(l) => write!(f, "no block labeled `{l}`"),
            MergeError::NotExtensible(l) => {
                write!(f, "block `{l}` cannot take more guarded commands")
            }
        }
    }
}

/// Grow a program: add whole blocks (fresh labels, or replacements for
/// abort placeholders with the same assertion) and append guarded commands
/// to existing blocks. New blocks land just before the halt block.
pub fn merge_snippet(
    program: &Program,
    new_blocks: &[Block],
    new_gcs: &BTreeMap<Ident, Vec<GuardedCommand>>,
) -> Result<Program, MergeError> {
    let mut merged = program.clone();

    for nb in new_blocks {
        match merged.blocks.iter_mut().find(|b| b.label == nb.label) {
            Some(existing) => {
                if existing.assertion != nb.assertion {
                    return Err(MergeError::AssertionMismatch(nb.label.clone()));
                }
                if !matches!(existing.body, BlockBody::Abort) {
                    return Err(MergeError::NotExtensible(nb.label.clone()));
                }
                existing.body = nb.body.clone();
            }
            None => {
                let halt_pos = merged
                    .blocks
                    .iter()
                    .position(|b| b.label == merged.halt)
                    .unwrap_or(merged.blocks.len());
                merged.blocks.insert(halt_pos, nb.clone());
            }
        }
    }

    for (label, gcs) in new_gcs {
        let block = merged
            .blocks
            .iter_mut()
            .find(|b| &b.label == label)
            .ok_or_else(|| MergeError::UnknownTarget(label.clone()))?;
        match &mut block.body {
            BlockBody::Abort => block.body = BlockBody::IfFi(gcs.clone()),
            BlockBody::IfFi(arms) => arms.extend(gcs.iter().cloned()),
            BlockBody::Straight(..) | BlockBody::Return(_) => {
                return Err(MergeError::NotExtensible(label.clone()))
            }
        }
    }

    // Every jump, old or new, must land on a block.
    for b in &merged.blocks {
        let mut targets: Vec<&Ident> = Vec::new();
        match &b.body {
            BlockBody::IfFi(arms) => {
                for gc in arms {
                    if let Terminal::Goto(l) = &gc.terminal {
                        targets.push(l);
                    }
                }
            }
            BlockBody::Straight(_, Terminal::Goto(l)) => targets.push(l),
            _ => {}
        }
        for t in targets {
            if merged.block(t).is_none() {
                return Err(MergeError::UnknownTarget(t.clone()));
            }
        }
    }
    Ok(merged)
}

/// Witness states print as `x=1, y=2` in variable-name order; arrays as
/// `p=[2, 3]`.
pub fn witness_text(state: &State) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    let mut first = true;
    for (name, value) in &state.scalars {
        if !first {
            out.push_str(", ");
        }
        first = false;
        let _ = write!(out, "{name}={value}");
    }
    for (name, values) in &state.arrays {
        if !first {
            out.push_str(", ");
        }
        first = false;
        let _ = write!(out, "{name}=[");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{v}");
        }
        out.push(']');
    }
    out
}
