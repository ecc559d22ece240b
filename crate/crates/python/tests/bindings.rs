use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(corrconv::corrconv)(py);
        let globals = PyDict::new(py);
        globals.set_item("corrconv", module).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None).unwrap_or_else(|e| panic!("{e}"));
    });
}

#[test]
fn pipeline_reaches_the_gap_law() {
    with_module(
        "rho = corrconv.input_state(1/3)\n\
         ab = corrconv.apply_joint(rho, 1/3).partial_trace([0, 1])\n\
         assert abs(corrconv.corner_block_gap(ab) - 2/9) < 1e-12\n\
         assert ab.is_ppt(1)\n\
         assert abs(corrconv.ree_closed_form(1/3, 1/3) - 2/9) < 1e-12\n",
    );
}

#[test]
fn reports_are_dicts() {
    with_module(
        "r = corrconv.correlation_report(1/3, 1.0)\n\
         assert abs(r['discord']) < 1e-9\n\
         v = {c['id']: c['verdict'] for c in corrconv.verify_claims()}\n\
         assert v['pauli-capacity-zero'] == 'confirmed'\n\
         b = corrconv.batch_repeater(10, 1/3, 1.0, 3)\n\
         assert b['flag0_count'] == 0 and b['paper_predicted'] == 0\n\
         q = corrconv.qudit_report(2, [2**-0.5, 2**-0.5], 0.0, m=0.0)\n\
         assert q['entangled']\n",
    );
}

#[test]
fn errors_become_value_errors() {
    with_module(
        "try:\n    corrconv.bell_diagonal_state(1, 1, 1)\n    raise AssertionError('accepted')\nexcept ValueError:\n    pass\n\
         try:\n    corrconv.DensityMatrix([[1, 0], [0, 1]], [2])\n    raise AssertionError('accepted')\nexcept ValueError:\n    pass\n",
    );
}
