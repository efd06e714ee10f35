use std::collections::BTreeMap;

use super::{BValuedModel, BvError, RelTable};
use crate::balg::{quotient_algebra, Filter};

/// `M/F`: elements identified when their equality value lies in `f`, values
/// pushed through the projection onto `B/F`. Each class is represented by
/// its smallest member.
pub fn quotient_model(m: &BValuedModel, f: &Filter) -> Result<BValuedModel, BvError> {
    let q = quotient_algebra(m.algebra(), f)?;
    let n = m.size();
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(i);
        for (j, slot) in class_of.iter_mut().enumerate().skip(i) {
            if f.contains(m.eq_value(i, j)) {
                *slot = c;
            }
        }
    }
    let k = reps.len();
    let domain = reps.iter().map(|&r| m.domain()[r].clone()).collect();
    let eq = reps.iter().map(|&a| reps.iter().map(|&b| q.project(m.eq_value(a, b))).collect()).collect();
    let mut relations = BTreeMap::new();
    for (name, r) in m.relations() {
        let size = k.pow(r.arity as u32);
        let table = (0..size)
            .map(|idx| {
                let mut t = vec![0; r.arity];
                let mut rest = idx;
                for slot in t.iter_mut().rev() {
                    *slot = reps[rest % k];
                    rest /= k;
                }
                q.project(&r.table[m.tuple_index(&t)])
            })
            .collect();
        relations.insert(name.clone(), RelTable { arity: r.arity, table });
    }
    let consts = m.consts().iter().map(|(c, &i)| (c.clone(), class_of[i])).collect();
    BValuedModel::new(q.algebra, domain, eq, relations, consts)
}
