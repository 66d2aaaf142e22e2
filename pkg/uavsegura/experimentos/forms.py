from django import forms
from django.core.exceptions import ValidationError

import cvxpy as cp

from nucleo.ajustes import parametro
from referencias.esquemas import BaselineKind


class SeccionForm(forms.Form):
    """
    Formulario de una seccion del archivo TOML.
    Las claves ausentes toman VALORES_POR_DEFECTO.
    """
    VALORES_POR_DEFECTO = {}

    def __init__(self, valores=None, *args, **kwargs):
        datos = {**self.VALORES_POR_DEFECTO, **(valores or {})}
        super().__init__(datos, *args, **kwargs)


class GeometriaForm(SeccionForm):
    """Seccion [geometria]: celda del UAV, usuarios, espias y antenas."""
    VALORES_POR_DEFECTO = {
        "radio_cobertura": 200.0,
        "altura_uav": 100.0,
        "clusters": 2,
        "usuarios": 8,
        "usuarios_por_cluster": 2,
        "espias": 2,
        "antenas": 4,
        "antenas_espia": 2,
    }

    radio_cobertura = forms.FloatField(min_value=1.0, label="Radio de cobertura (m)")
    altura_uav = forms.FloatField(min_value=0.0, label="Altura del UAV (m)")
    clusters = forms.IntegerField(min_value=1, label="Clusters (M)")
    usuarios = forms.IntegerField(min_value=1, label="Usuarios")
    usuarios_por_cluster = forms.IntegerField(
        min_value=0,
        label="Usuarios programados por cluster",
        help_text="0 programa a todos los usuarios del cluster.",
    )
    espias = forms.IntegerField(min_value=0, label="Espias (J)")
    antenas = forms.IntegerField(min_value=2, label="Antenas del UAV (N_t)")
    antenas_espia = forms.IntegerField(min_value=1, label="Antenas por espia (N_e)")

    def clean_radio_cobertura(self):
        # Obtiene el radio ya convertido a float por Django
        radio = self.cleaned_data.get("radio_cobertura")
        # Los usuarios se ubican a mas de 1 m del centro, la celda debe ser mayor
        if radio is not None and radio <= 1.0:
            raise ValidationError("El radio de cobertura debe superar 1 m")
        # Si la validacion es exitosa, devuelve el valor del campo
        return radio

    def clean(self):
        """
        Validaciones que cruzan campos de la seccion.
        Los errores quedan en __all__ del formulario.
        """
        cleaned_data = super().clean()
        clusters = cleaned_data.get("clusters")
        antenas = cleaned_data.get("antenas")
        usuarios = cleaned_data.get("usuarios")
        por_cluster = cleaned_data.get("usuarios_por_cluster")
        # el forzado a cero necesita N_t >= M
        if clusters and antenas and antenas < clusters:
            raise ValidationError(
                f"Se necesitan al menos tantas antenas como clusters ({antenas} < {clusters})"
            )
        if usuarios and por_cluster and por_cluster > usuarios:
            raise ValidationError("No se pueden programar mas usuarios por cluster que usuarios en total")
        # Si todo es correcto, devuelve los datos limpios
        return cleaned_data


class PerdidasForm(SeccionForm):
    """Seccion [perdidas]: exponentes LoS/NLoS y constantes del entorno."""
    VALORES_POR_DEFECTO = {
        "exponente_los": 2.0,
        "exponente_nlos": 3.5,
        "lambda1": 9.61,
        "lambda2": 0.16,
    }

    exponente_los = forms.FloatField(min_value=0.0, label="Exponente LoS")
    exponente_nlos = forms.FloatField(min_value=0.0, label="Exponente NLoS")
    lambda1 = forms.FloatField(min_value=0.0, label="Constante de entorno lambda1")
    lambda2 = forms.FloatField(min_value=0.0, label="Constante de entorno lambda2")

    def clean(self):
        cleaned_data = super().clean()
        # En LoS la senal se atenua menos que en NLoS
        los = cleaned_data.get("exponente_los")
        nlos = cleaned_data.get("exponente_nlos")
        if los is not None and nlos is not None and los > nlos:
            raise ValidationError("El exponente LoS no puede superar al NLoS")
        return cleaned_data


class OutageForm(SeccionForm):
    """Seccion [outage]: tolerancias, potencia total y ruido (en dBW)."""
    VALORES_POR_DEFECTO = {
        "eps_cop": 0.1,
        "eps_sop": 0.1,
        "potencia_dbw": 0.0,
        "ruido_uav_dbw": -110.0,
        "ruido_espia_dbw": -110.0,
    }

    eps_cop = forms.FloatField(label="Tolerancia de corte de conexion")
    eps_sop = forms.FloatField(label="Tolerancia de corte de secreto")
    potencia_dbw = forms.FloatField(label="Potencia total P (dBW)")
    ruido_uav_dbw = forms.FloatField(label="Ruido en el UAV (dBW)")
    ruido_espia_dbw = forms.FloatField(label="Ruido en los espias (dBW)")

    def _probabilidad(self, nombre):
        """Las tolerancias de corte son probabilidades en (0, 1)."""
        valor = self.cleaned_data.get(nombre)
        if valor is not None and not 0.0 < valor < 1.0:
            raise ValidationError("Debe estar estrictamente entre 0 y 1")
        return valor

    def clean_eps_cop(self):
        return self._probabilidad("eps_cop")

    def clean_eps_sop(self):
        return self._probabilidad("eps_sop")


class SolverForm(SeccionForm):
    """Seccion [solver]: topes del descenso por bloques."""
    VALORES_POR_DEFECTO = {
        "t_max": 20,
        "q_max": 20,
        "delta_i": 1e-2,
        "epsilon": 1e-3,
        "max_reducciones": 5,
    }

    t_max = forms.IntegerField(min_value=1, label="Iteraciones internas maximas")
    q_max = forms.IntegerField(min_value=1, label="Iteraciones externas maximas")
    delta_i = forms.FloatField(label="Umbral del bucle interno")
    epsilon = forms.FloatField(label="Tolerancia del bucle externo")
    max_reducciones = forms.IntegerField(min_value=0, label="Reducciones de paso")
    solver = forms.CharField(label="Solver de cvxpy")

    def __init__(self, valores=None, *args, **kwargs):
        super().__init__({"solver": parametro("SOLVER"), **(valores or {})}, *args, **kwargs)

    def clean_delta_i(self):
        delta_i = self.cleaned_data.get("delta_i")
        if delta_i is not None and delta_i <= 0:
            raise ValidationError("El umbral debe ser positivo")
        return delta_i

    def clean_epsilon(self):
        epsilon = self.cleaned_data.get("epsilon")
        if epsilon is not None and epsilon <= 0:
            raise ValidationError("La tolerancia debe ser positiva")
        return epsilon

    def clean_solver(self):
        # cvxpy nombra los solvers en mayusculas
        solver = self.cleaned_data.get("solver", "").upper()
        # Solo se aceptan los solvers instalados en este entorno
        if solver not in cp.installed_solvers():
            raise ValidationError(f"El solver {solver} no esta instalado")
        return solver


class ExperimentoForm(SeccionForm):
    """Seccion [experimento]: ensayos, semilla y esquemas a comparar."""
    VALORES_POR_DEFECTO = {
        "ensayos": 50,
        "esquemas": [kind.value for kind in BaselineKind],
    }

    ensayos = forms.IntegerField(min_value=1, label="Ensayos")
    semilla = forms.IntegerField(min_value=0, max_value=2 ** 64 - 1, label="Semilla maestra")
    esquemas = forms.MultipleChoiceField(choices=BaselineKind.choices, label="Esquemas")

    def __init__(self, valores=None, *args, **kwargs):
        super().__init__({"semilla": parametro("SEMILLA"), **(valores or {})}, *args, **kwargs)


SECCIONES = {
    "geometria": GeometriaForm,
    "perdidas": PerdidasForm,
    "outage": OutageForm,
    "solver": SolverForm,
    "experimento": ExperimentoForm,
}
