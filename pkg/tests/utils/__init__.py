# pyright: reportTypedDictNotRequiredAccess=false
