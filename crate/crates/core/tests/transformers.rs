//! Abstract operators against the concrete ones: for concrete operands,
//! the abstraction of the concrete result is below the abstract result.

mod common;

use notjs::absem::aeval_exp;
use notjs::concrete::{eval_exp, CValue};
use notjs::domains::alpha;
use notjs::ir::{name, BinOp, Exp, UnOp};
use proptest::prelude::*;

use common::*;

fn var(x: &str) -> Box<Exp> {
    Box::new(Exp::Var(name(x)))
}

/// Checks `e` over operands bound to `x` and `y`.
fn check(heap: &Heap, e: &Exp, x: &CValue, y: &CValue) -> Result<(), String> {
    let (store, env, aenv, astore) = heap.bind(x, y);
    let concrete = eval_exp(e, &env, &store);
    let want = alpha(&concrete, &|a| abs_addr(&store, a));
    let got = aeval_exp(e, &aenv, &astore);
    if want.leq(&got) {
        Ok(())
    } else {
        Err(format!("{e:?} with x={x:?} y={y:?}: concrete {concrete:?}, abstract {got}"))
    }
}

fn arb_prim() -> impl Strategy<Value = CValue> {
    prop_oneof![
        prop::sample::select(prim_alphabet()),
        any::<f64>().prop_map(CValue::Num),
        (-5i32..300).prop_map(|n| CValue::Num(n as f64)),
        "[a-z0-9.e+-]{0,5}".prop_map(|s| CValue::Str(name(&s))),
        (-5i32..300).prop_map(|n| CValue::Str(name(&n.to_string()))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn binops_over_approximate(op in prop::sample::select(BinOp::ALL.to_vec()), x in arb_prim(), y in arb_prim(), obj in 0usize..4) {
        let heap = Heap::new();
        // Occasionally replace an operand with an object.
        let x = if obj == 1 { heap.objects[0].clone() } else { x };
        let y = if obj == 2 { heap.objects[1].clone() } else { y };
        let e = Exp::Bin(op, var("x"), var("y"));
        prop_assert!(check(&heap, &e, &x, &y).is_ok(), "{}", check(&heap, &e, &x, &y).unwrap_err());
    }

    #[test]
    fn unops_over_approximate(op in prop::sample::select(UnOp::ALL.to_vec()), x in arb_prim()) {
        let heap = Heap::new();
        let e = Exp::Un(op, var("x"));
        prop_assert!(check(&heap, &e, &x, &CValue::Undef).is_ok(), "{}", check(&heap, &e, &x, &CValue::Undef).unwrap_err());
    }
}

#[test]
fn alphabet_with_objects() {
    let heap = Heap::new();
    let alphabet = heap.alphabet();
    let mut failures = Vec::new();
    for op in UnOp::ALL {
        for x in &alphabet {
            failures.extend(check(&heap, &Exp::Un(op, var("x")), x, &CValue::Undef).err());
        }
    }
    for op in [BinOp::Dot, BinOp::InstanceOf, BinOp::In, BinOp::Add, BinOp::LooseEq, BinOp::StrictEq] {
        for x in &alphabet {
            for y in &alphabet {
                failures.extend(check(&heap, &Exp::Bin(op, var("x"), var("y")), x, y).err());
            }
        }
    }
    assert!(failures.is_empty(), "{} failures, first: {}", failures.len(), failures[0]);
}
