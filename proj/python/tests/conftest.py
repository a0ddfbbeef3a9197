import glob
import importlib.util
import os
import sys

# ctest points this at the freshly built extension so an installed copy cannot shadow it.
_dir = os.environ.get("GEOPROJ_MODULE_DIR")
if _dir:
    _found = glob.glob(os.path.join(_dir, "geoproj*.so")) + glob.glob(os.path.join(_dir, "geoproj*.pyd"))
    if not _found:
        raise RuntimeError(f"no geoproj extension in {_dir}")
    _spec = importlib.util.spec_from_file_location("geoproj", _found[0])
    _mod = importlib.util.module_from_spec(_spec)
    _spec.loader.exec_module(_mod)
    sys.modules["geoproj"] = _mod
