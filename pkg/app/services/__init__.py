"""시뮬레이션 계산을 담당하는 서비스 모듈입니다.

각 서비스는 입력 값의 순수 함수로 구성되며, 구성 값 객체는 스레드 간에 공유해도 안전합니다.
"""
